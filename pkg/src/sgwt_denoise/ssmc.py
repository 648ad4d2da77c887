"""Client for the SuiteSparse Matrix Collection.

Graphs are fetched as ``<base>/MM/<group>/<name>.tar.gz``, parsed, validated
and cached on disk as a bundle directory::

    <cache>/<group>/<name>/
        matrix.mm     weight matrix, canonical Matrix Market (lower triangle)
        coords.csv    "x,y" header then one row per vertex (absent if no layout)
        info.txt      the comment block of the source .mtx file
        meta.json     dims, source and format version

The raw archive is kept next to the bundle as ``<name>.tar.gz``.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import shutil
import tarfile
import tempfile
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path, PurePosixPath

import numpy as np
from filelock import FileLock

from .errors import FormatError, TransportError, ValidationError
from .graph import SparseGraph
from .mmio import parse_matrix_market, write_matrix_market

log = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://sparse.tamu.edu"
BASE_URL_ENV = "SSMC_BASE_URL"
CACHE_DIR_ENV = "SSMC_CACHE_DIR"
BUNDLE_VERSION = 1

_key_locks: dict[tuple[str, str, str], threading.Lock] = {}
_key_locks_guard = threading.Lock()


@dataclass(frozen=True)
class GraphSource:
    group: str
    name: str
    url: str


@dataclass(frozen=True)
class GraphBundle:
    graph: SparseGraph
    source: GraphSource
    cached_at: Path

    @property
    def sA(self):
        return self.graph.weights

    @property
    def xy(self):
        return self.graph.coords

    @property
    def dim(self):
        return self.graph.dims

    @property
    def info(self) -> str:
        return self.graph.info


def base_url(override: str | None = None) -> str:
    return (override or os.environ.get(BASE_URL_ENV) or DEFAULT_BASE_URL).rstrip("/")


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_DIR_ENV)
    if env:
        return Path(env)
    return Path(tempfile.gettempdir()) / "ssmc-cache"


def archive_url(group: str, name: str, base: str | None = None) -> str:
    return f"{base_url(base)}/MM/{group}/{name}.tar.gz"


def _check_key(group: str, name: str) -> None:
    for part in (group, name):
        if not part or "/" in part or "\\" in part or part in (".", ".."):
            raise ValidationError(f"invalid collection key {group!r}/{name!r}")


# ---------------------------------------------------------------------------
# bundle directory format


def save_bundle(bundle: GraphBundle, path) -> Path:
    """Write ``bundle`` to directory ``path`` (created if needed)."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    g = bundle.graph
    (path / "matrix.mm").write_text(write_matrix_market(g.weights, symmetric=True), encoding="utf-8")
    coords_file = path / "coords.csv"
    if g.coords is not None:
        with open(coords_file, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "y"])
            for x, y in g.coords:
                w.writerow([repr(float(x)), repr(float(y))])
    elif coords_file.exists():
        coords_file.unlink()
    with open(path / "info.txt", "w", newline="", encoding="utf-8") as fh:
        fh.write(g.info)
    meta = {
        "format_version": BUNDLE_VERSION,
        "dims": {"NumRows": g.dims[0], "NumCols": g.dims[1], "NonZeros": g.dims[2]},
        "has_coords": g.coords is not None,
        "source": {"group": bundle.source.group, "name": bundle.source.name, "url": bundle.source.url},
    }
    # meta.json goes last: its presence marks a complete bundle
    (path / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _read_meta(path: Path) -> dict:
    meta_file = path / "meta.json"
    if not meta_file.exists():
        raise FormatError(f"{meta_file} not found")
    text = meta_file.read_text(encoding="utf-8")
    try:
        meta = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{meta_file}: {exc.msg} (column {exc.colno})", line=exc.lineno) from None
    if not isinstance(meta, dict):
        raise FormatError(f"{meta_file}: expected a JSON object")
    version = meta.get("format_version")
    if not isinstance(version, int) or version > BUNDLE_VERSION or version < 1:
        raise FormatError(f"{meta_file}: unsupported bundle format version {version!r}")
    try:
        d = meta["dims"]
        meta["_dims"] = (int(d["NumRows"]), int(d["NumCols"]), int(d["NonZeros"]))
        src = meta["source"]
        meta["_source"] = GraphSource(str(src["group"]), str(src["name"]), str(src["url"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{meta_file}: malformed field ({exc})") from None
    return meta


def _read_coords(path: Path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["x", "y"]:
        raise FormatError(f"{path}: expected header 'x,y'", line=1)
    out = np.empty((len(rows) - 1, 2))
    for k, row in enumerate(rows[1:]):
        try:
            out[k] = [float(row[0]), float(row[1])]
        except (ValueError, IndexError):
            raise FormatError(f"{path}: bad coordinate row {row!r}", line=k + 2) from None
    return out


def load_bundle(path) -> GraphBundle:
    """Read a bundle directory written by :func:`save_bundle`.

    Raises:
        FormatError: missing or corrupt files, unknown format version.
        ValidationError: the stored matrix is not a valid graph.
    """
    path = Path(path)
    if not path.is_dir():
        raise FormatError(f"bundle directory {path} not found")
    meta = _read_meta(path)
    mm = parse_matrix_market((path / "matrix.mm").read_bytes())
    if mm.header.format != "coordinate":
        raise FormatError(f"{path / 'matrix.mm'}: expected coordinate format")
    coords = None
    if meta.get("has_coords", (path / "coords.csv").exists()):
        coords = _read_coords(path / "coords.csv")
    with open(path / "info.txt", newline="", encoding="utf-8") as fh:
        info = fh.read()
    graph = SparseGraph(mm.matrix, coords=coords, dims=meta["_dims"], info=info)
    return GraphBundle(graph, meta["_source"], path)


# ---------------------------------------------------------------------------
# archive handling


def _archive_members(data: bytes) -> dict[str, bytes]:
    try:
        with tarfile.open(fileobj=io.BytesIO(data), mode="r:gz") as tar:
            out = {}
            for member in tar.getmembers():
                if member.isfile():
                    fh = tar.extractfile(member)
                    if fh is not None:
                        out[member.name] = fh.read()
            return out
    except (tarfile.TarError, OSError, EOFError) as exc:
        raise FormatError(f"corrupt archive: {exc}") from None


def _pick(members: dict[str, bytes], name: str):
    by_base = {}
    for full in members:
        by_base.setdefault(PurePosixPath(full).name, full)
    matrix = by_base.get(f"{name}.mtx")
    coord = by_base.get(f"{name}_coord.mtx")
    if coord is None:
        candidates = [k for b, k in by_base.items() if "_coord" in b]
        if len(candidates) == 1:
            coord = candidates[0]
    return matrix, coord


def bundle_from_archive(data: bytes, group: str, name: str, url: str, cached_at: Path) -> GraphBundle:
    """Build a GraphBundle from the bytes of a collection ``.tar.gz``."""
    members = _archive_members(data)
    matrix_key, coord_key = _pick(members, name)
    if matrix_key is None:
        raise FormatError(f"archive has no {name}.mtx (members: {sorted(members)})")
    mm = parse_matrix_market(members[matrix_key])
    if mm.header.format != "coordinate":
        raise FormatError(f"{matrix_key}: weight matrix must be in coordinate format")
    if mm.header.symmetry == "skew-symmetric":
        raise ValidationError(f"{matrix_key}: skew-symmetric matrices are not graphs")
    coords = None
    if coord_key is not None:
        cm = parse_matrix_market(members[coord_key])
        xy = cm.matrix.toarray() if hasattr(cm.matrix, "toarray") else np.asarray(cm.matrix)
        if xy.shape[1] < 2:
            raise FormatError(f"{coord_key}: need at least two coordinate columns")
        coords = xy[:, :2]
    graph = SparseGraph(mm.matrix, coords=coords, dims=(mm.rows, mm.cols, mm.entries), info=mm.comments)
    return GraphBundle(graph, GraphSource(group, name, url), cached_at)


def fetch(url: str, timeout: float = 60.0) -> bytes:
    log.info("GET %s", url)
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            return resp.read()
    except urllib.error.HTTPError as exc:
        raise TransportError(f"HTTP {exc.code} fetching {url}", status=exc.code, url=url) from None
    except (urllib.error.URLError, OSError) as exc:
        reason = getattr(exc, "reason", exc)
        raise TransportError(f"cannot fetch {url}: {reason}", url=url) from None


def _key_lock(cache_dir: Path, group: str, name: str) -> threading.Lock:
    key = (str(cache_dir.resolve()), group, name)
    with _key_locks_guard:
        return _key_locks.setdefault(key, threading.Lock())


def download_graph(group: str, name: str, cache_dir=None, base: str | None = None,
                   timeout: float = 60.0) -> GraphBundle:
    """Fetch ``group/name`` from the collection, or return the cached bundle.

    Args:
        group: collection group, e.g. ``"AG-Monien"``.
        name: matrix name, e.g. ``"grid1"``.
        cache_dir: cache root; defaults to ``$SSMC_CACHE_DIR`` or a folder in
            the system temp directory.
        base: collection base URL; defaults to ``$SSMC_BASE_URL`` or the public
            endpoint.

    Raises:
        TransportError: HTTP or connection failure (``status`` carries the code).
        FormatError: archive or Matrix Market content is malformed.
        ValidationError: the matrix is not a valid undirected graph. The raw
            archive stays in the cache for inspection.
    """
    _check_key(group, name)
    cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    target = cache_dir / group / name
    raw = cache_dir / group / f"{name}.tar.gz"
    url = archive_url(group, name, base)
    target.parent.mkdir(parents=True, exist_ok=True)

    with _key_lock(cache_dir, group, name), FileLock(str(cache_dir / group / f".{name}.lock")):
        if (target / "meta.json").exists():
            return load_bundle(target)
        if raw.exists():
            data = raw.read_bytes()
        else:
            data = fetch(url, timeout=timeout)
            tmp = raw.with_suffix(".part")
            tmp.write_bytes(data)
            tmp.replace(raw)
        bundle = bundle_from_archive(data, group, name, url, target)
        staging = target.with_name(f".{name}.staging")
        if staging.exists():
            shutil.rmtree(staging)
        save_bundle(bundle, staging)
        if target.exists():
            shutil.rmtree(target)
        staging.replace(target)
        return load_bundle(target)
