import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgwt_denoise import (
    FilterBank,
    ParameterError,
    ValidationError,
    eigensort,
    filter_curves,
    laplacian_mat,
    omega,
    psi,
    scale_count,
    tight_frame,
)
from sgwt_denoise.graph import SparseGraph


def test_omega_values():
    assert omega(0, 2) == 1.0
    assert omega(1.5, 2) == 0.0
    # midpoint of [1/2, 1]: (1 + cos(pi/2)) / 2
    assert omega(0.75, 2) == pytest.approx(0.5, abs=1e-15)
    assert omega(0.5, 2) == 1.0
    assert omega(1.0, 2) == 0.0


def test_omega_rejects_small_b():
    with pytest.raises(ParameterError):
        omega(0.3, 1.0)


def test_omega_monotone_continuous():
    x = np.linspace(0, 1.2, 20001)
    w = omega(x, 3.0)
    assert np.all(np.diff(w) <= 0)
    assert np.max(np.abs(np.diff(w))) < 1e-3


@pytest.mark.parametrize(
    "lmax, b, J",
    [
        (8.0, 2.0, 5),  # floor(log 8 / log 2) + 2
        (7.99, 2.0, 4),
        (8.0 * (1 + 1e-14), 2.0, 5),
        (8.0 * (1 - 1e-14), 2.0, 5),
        (10.0, 4.0, 3),
        (1000.0, 10.0, 5),
        (0.3, 2.0, 0),
        (0.6, 2.0, 1),
    ],
)
def test_scale_count(lmax, b, J):
    assert scale_count(lmax, b) == J


def test_psi_examples():
    bank = FilterBank(2.0, 8.0)
    assert bank.J == 5
    assert psi(0, 0.0, bank) == 1.0
    x = 8.0 / 3
    assert sum(psi(j, x, bank) for j in range(bank.J + 1)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(IndexError):
        psi(6, 1.0, bank)
    with pytest.raises(IndexError):
        psi(-1, 1.0, bank)


def test_psi_definition_matches_omega():
    bank = FilterBank(2.0, 8.0)
    for x in (0.3, 1.7, 4.2, 7.9):
        assert bank.psi(0, x) == omega(x, 2.0)
        for j in range(1, bank.J + 1):
            assert bank.psi(j, x) == omega(x / 2**j, 2.0) - omega(x / 2 ** (j - 1), 2.0)


def test_psi_clamps_above_lmax():
    bank = FilterBank(2.0, 8.0)
    assert bank.psi(bank.J, 8.0 + 1e-9) == bank.psi(bank.J, 8.0)


@settings(max_examples=60, deadline=None)
@given(b=st.floats(1.05, 8.0), lmax=st.floats(1e-2, 1e3))
def test_partition_of_unity_property(b, lmax):
    bank = FilterBank(b, lmax)
    x = np.linspace(0, lmax, 997)
    vals = bank.all(x)
    assert np.max(np.abs(vals.sum(axis=0) - 1)) <= 1e-12
    assert vals.min() >= 0 and vals.max() <= 1


def test_filter_curves():
    bank = FilterBank(2.0, 8.0)
    table = filter_curves(bank, 101)
    assert table.shape == (101, bank.J + 2)
    np.testing.assert_allclose(table[:, 1:].sum(axis=1), 1.0, atol=1e-12)
    np.testing.assert_array_equal(table[0, 1:], [1, 0, 0, 0, 0, 0])
    last = table[-1]
    assert last[0] == 8.0
    np.testing.assert_array_equal(last[1:], [bank.psi(j, 8.0) for j in range(bank.J + 1)])
    with pytest.raises(ParameterError):
        filter_curves(bank, 1)


def test_tight_frame_k2(k2):
    es = eigensort(laplacian_mat(k2))
    np.testing.assert_allclose(es.evalues, [0, 2], atol=1e-14)
    T = tight_frame(es, 2.0).matrix
    np.testing.assert_allclose(T.T @ T, np.eye(2), atol=1e-10)


def test_tight_frame_p3_block0_bruteforce(p3):
    es = eigensort(laplacian_mat(p3))
    frame = tight_frame(es, 2.0)
    lam, u = es.evalues, es.evectors
    expected = sum(math.sqrt(omega(max(l, 0.0), 2.0)) * np.outer(u[:, i], u[:, i]) for i, l in enumerate(lam))
    np.testing.assert_allclose(frame.block(0), expected, atol=1e-12)
    for j in range(frame.J + 1):
        B = frame.block(j)
        np.testing.assert_allclose(B, B.T, atol=1e-10)


def test_tight_frame_grid1_shape(grid1_spectral):
    frame, es = grid1_spectral.frame, grid1_spectral.es
    J = scale_count(es.lmax, 2.0)
    assert frame.J == J
    assert frame.matrix.shape == ((J + 1) * 252, 252)


def test_frame_invariants(grid1_spectral):
    frame, es = grid1_spectral.frame, grid1_spectral.es
    T = frame.matrix
    np.testing.assert_allclose(T.T @ T, np.eye(252), atol=1e-8)
    assert np.trace(T @ T.T) == pytest.approx(252, abs=1e-6)
    bank = FilterBank(2.0, es.lmax)
    u = es.evectors
    for j in range(frame.J + 1):
        B = frame.block(j)
        psi_j = (u * bank.psi(j, es.evalues)) @ u.T
        np.testing.assert_allclose(B @ B, psi_j, atol=1e-8)


def test_degenerate_spectrum():
    es = eigensort(laplacian_mat(SparseGraph.from_dense(np.zeros((3, 3)))))
    with pytest.raises(ValidationError, match="degenerate spectrum"):
        tight_frame(es, 2.0)


def test_bank_rejects_bad_params():
    with pytest.raises(ParameterError):
        FilterBank(1.0, 8.0)
    with pytest.raises(ParameterError):
        FilterBank(2.0, 0.0)
