"""Sparse weighted graphs, the combinatorial Laplacian and its eigendecomposition."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ParameterError, ValidationError

#: Largest n accepted by :func:`eigensort` unless overridden.
DEFAULT_EIGEN_CAP = 4096


def _first_asymmetry(m: sp.spmatrix) -> tuple[int, int] | None:
    diff = (m - m.T).tocoo()
    diff.eliminate_zeros()
    if diff.nnz == 0:
        return None
    order = np.lexsort((diff.col, diff.row))
    k = order[0]
    return int(diff.row[k]), int(diff.col[k])


def _check_square_symmetric(m: sp.spmatrix, what: str) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{what} must be square, got shape {m.shape}")
    bad = _first_asymmetry(m)
    if bad is not None:
        i, j = bad
        raise ValidationError(
            f"{what} is not symmetric: entry ({i}, {j}) = {float(m[i, j])!r} "
            f"but ({j}, {i}) = {float(m[j, i])!r}"
        )


@dataclass(frozen=True)
class SparseGraph:
    """Undirected weighted graph.

    Args:
        weights: symmetric n x n sparse weight matrix with a zero diagonal and
            non-negative finite entries. Stored as CSC.
        coords: optional (n, 2) planar vertex layout.
        dims: (num_rows, num_cols, num_nonzeros). ``num_nonzeros`` counts each
            symmetric pair once, the way the collection reports it. Computed
            from ``weights`` when omitted.
        info: free provenance text.
    """

    weights: sp.csc_matrix
    coords: np.ndarray | None = None
    dims: tuple[int, int, int] | None = None
    info: str = ""

    def __post_init__(self):
        w = self.weights
        if not sp.issparse(w):
            w = sp.csc_matrix(np.asarray(w, dtype=float))
        w = sp.csc_matrix(w, dtype=float)
        w.sum_duplicates()
        if not np.all(np.isfinite(w.data)):
            raise ValidationError("weight matrix has non-finite entries")
        _check_square_symmetric(w, "weight matrix")
        if np.any(w.data < 0):
            coo = w.tocoo()
            k = int(np.flatnonzero(coo.data < 0)[0])
            raise ValidationError(
                f"negative weight {float(coo.data[k])!r} at ({coo.row[k]}, {coo.col[k]})"
            )
        diag = w.diagonal()
        if np.any(diag != 0):
            i = int(np.flatnonzero(diag)[0])
            raise ValidationError(f"self-loop at vertex {i} (weight {float(diag[i])!r}); diagonal must be zero")
        object.__setattr__(self, "weights", w)

        n = w.shape[0]
        if self.coords is not None:
            xy = np.asarray(self.coords, dtype=float)
            if xy.ndim != 2 or xy.shape != (n, 2):
                raise ValidationError(f"coords must have shape ({n}, 2), got {xy.shape}")
            object.__setattr__(self, "coords", xy)

        stored = int(sp.tril(w).count_nonzero())
        if self.dims is None:
            object.__setattr__(self, "dims", (n, n, stored))
        else:
            dims = tuple(int(d) for d in self.dims)
            if dims[0] != n or dims[1] != n:
                raise ValidationError(f"dims {dims} disagree with matrix shape {w.shape}")
            object.__setattr__(self, "dims", dims)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @classmethod
    def from_dense(cls, w, coords=None, info: str = "") -> "SparseGraph":
        return cls(sp.csc_matrix(np.asarray(w, dtype=float)), coords=coords, info=info)

    @classmethod
    def from_edges(cls, n: int, edges, weights=None, coords=None, info: str = "") -> "SparseGraph":
        """Build from an undirected edge list of (i, j) pairs, i != j."""
        edges = np.asarray(edges, dtype=int).reshape(-1, 2)
        vals = np.ones(len(edges)) if weights is None else np.asarray(weights, dtype=float)
        rows = np.concatenate([edges[:, 0], edges[:, 1]])
        cols = np.concatenate([edges[:, 1], edges[:, 0]])
        w = sp.csc_matrix((np.concatenate([vals, vals]), (rows, cols)), shape=(n, n))
        return cls(w, coords=coords, info=info)

    def edges(self) -> np.ndarray:
        """Unordered edges as an (m, 2) array with i < j, sorted lexicographically."""
        upper = sp.triu(self.weights, k=1).tocoo()
        order = np.lexsort((upper.col, upper.row))
        return np.column_stack([upper.row[order], upper.col[order]])


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues and orthonormal eigenvectors (column i pairs with evalues[i])."""

    evalues: np.ndarray
    evectors: np.ndarray
    lmax: float = field(init=False)

    def __post_init__(self):
        lam = np.asarray(self.evalues, dtype=float)
        u = np.asarray(self.evectors, dtype=float)
        if lam.ndim != 1 or u.shape != (lam.size, lam.size):
            raise ValidationError(f"eigenvectors shape {u.shape} does not match {lam.size} eigenvalues")
        if np.any(np.diff(lam) < 0):
            raise ValidationError("eigenvalues must be sorted ascending")
        lam.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "evalues", lam)
        object.__setattr__(self, "evectors", u)
        object.__setattr__(self, "lmax", float(lam[-1]))

    @property
    def n(self) -> int:
        return self.evalues.size


def degrees(g: SparseGraph) -> np.ndarray:
    """Weighted degree of every vertex (row sums of the weight matrix)."""
    return np.asarray(g.weights.sum(axis=1)).ravel()


def laplacian_mat(g) -> sp.csc_matrix:
    """Unnormalized Laplacian ``D - W``.

    Args:
        g: a :class:`SparseGraph`, or a raw square weight matrix which is then
            validated the same way.

    Returns:
        Symmetric sparse CSC matrix with zero row sums.
    """
    if not isinstance(g, SparseGraph):
        g = SparseGraph(g)
    w = g.weights
    return sp.csc_matrix(sp.diags(degrees(g)) - w)


def _fix_signs(u: np.ndarray) -> np.ndarray:
    # largest |component| positive; argmax returns the lowest index on ties
    idx = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[idx, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs


def eigensort(L, max_n: int = DEFAULT_EIGEN_CAP) -> EigenSystem:
    """Dense symmetric eigendecomposition sorted by ascending eigenvalue.

    Eigenvector signs are normalised so the largest-magnitude entry of each
    column is positive, which makes the output reproducible.

    Raises:
        ValidationError: if ``L`` is not square and symmetric, or larger than
            ``max_n``.
    """
    m = L if sp.issparse(L) else sp.csc_matrix(np.asarray(L, dtype=float))
    _check_square_symmetric(m, "Laplacian")
    n = m.shape[0]
    if n > max_n:
        raise ParameterError(
            f"dense eigendecomposition too large: n={n} exceeds cap {max_n}"
        )
    dense = m.toarray() if sp.issparse(m) else np.asarray(m)
    if not np.all(np.isfinite(dense)):
        raise ValidationError("Laplacian has non-finite entries")
    lam, u = np.linalg.eigh(dense)
    order = np.argsort(lam, kind="stable")
    return EigenSystem(lam[order], _fix_signs(u[:, order]))
