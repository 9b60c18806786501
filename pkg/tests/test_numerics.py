"""Tests for the deterministic matrix kernel."""

from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from nclebesgue.core.exceptions import InvalidMatrix, NotHermitian, NotPSD
from nclebesgue.linalg.numerics import (
    DEFAULT_TOLERANCE,
    Tolerance,
    ando_iterates,
    as_matrix,
    dagger,
    hermitian_eig,
    kernel_basis,
    matrix_exp,
    null_space,
    parallel_sum,
    pseudo_inverse,
    psd_check,
    psd_sqrt,
    range_basis,
    rank_cutoff,
    require_hermitian,
    require_psd,
    shorted_operator,
    spectral_split,
)

from _helpers import PAULI_X, random_hermitian, random_matrix, random_psd

sizes = st.integers(min_value=1, max_value=6)
seeds = st.integers(min_value=0, max_value=2**32 - 1)
FAST = settings(max_examples=30, deadline=None)


def _psd_residual(m: np.ndarray) -> float:
    """Most negative eigenvalue magnitude (0 for PSD)."""
    return max(0.0, -float(np.linalg.eigvalsh((m + dagger(m)) / 2)[0]))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def test_as_matrix_rejects_non_square():
    with pytest.raises(InvalidMatrix):
        as_matrix(np.zeros((2, 3)))


def test_as_matrix_rejects_nan():
    with pytest.raises(InvalidMatrix):
        as_matrix(np.array([[np.nan, 0], [0, 1]]))


def test_require_hermitian_rejects_asymmetric():
    with pytest.raises(NotHermitian):
        require_hermitian(np.array([[0, 1], [0, 0]]))


def test_require_hermitian_symmetrizes_round_off():
    m = PAULI_X + 1e-14 * np.array([[0, 1], [0, 0]])
    out = require_hermitian(m)
    assert np.allclose(out, dagger(out), atol=0)


def test_rank_cutoff_is_relative():
    tol = Tolerance(rank_rel=1e-9)
    assert rank_cutoff(np.array([1e-12, 1e-13]), tol) == pytest.approx(1e-21, rel=1e-9, abs=0.0)
    assert rank_cutoff(np.array([100.0, 1.0]), tol) == pytest.approx(1e-7)
    assert rank_cutoff(np.zeros(3), tol) == 0.0


def test_rank_cutoff_of_block_uses_parent_scale():
    tol = Tolerance(rank_rel=1e-9)
    assert rank_cutoff(np.array([1e-14]), tol, scale=1.0) == pytest.approx(1e-9)
    assert rank_cutoff(np.array([4.0]), tol, scale=1.0) == pytest.approx(4e-9)


# ---------------------------------------------------------------------------
# Spectral operations
# ---------------------------------------------------------------------------


@FAST
@given(sizes, seeds)
def test_hermitian_eig_reconstructs_descending(n, seed):
    """Eigenvalues come out descending and U diag(e) U* gives back the input."""
    h = random_hermitian(n, np.random.default_rng(seed), scale=3.0)
    evals, u = hermitian_eig(h)
    assert np.all(np.diff(evals) <= 1e-12)
    assert np.allclose((u * evals) @ dagger(u), h, atol=1e-10)
    assert np.allclose(dagger(u) @ u, np.eye(n), atol=1e-10)


def test_hermitian_eig_is_reproducible():
    h = random_hermitian(5, np.random.default_rng(3))
    e1, u1 = hermitian_eig(h)
    e2, u2 = hermitian_eig(h.copy())
    assert np.array_equal(e1, e2)
    assert np.array_equal(u1, u2)


@FAST
@given(sizes, seeds)
def test_psd_sqrt_squares_back(n, seed):
    m = random_psd(n, np.random.default_rng(seed))
    r = psd_sqrt(m)
    assert np.allclose(r @ r, m, atol=1e-9 * max(1.0, np.linalg.norm(m, 2)))


@FAST
@given(sizes, seeds)
def test_matrix_exp_matches_scipy(n, seed):
    """Hermitian, skew-Hermitian and general inputs all agree with scipy's expm."""
    rng = np.random.default_rng(seed)
    h = random_hermitian(n, rng)
    general = random_matrix(n, rng) / (2 * n)
    for m in (h, 1j * h, general):
        assert np.allclose(matrix_exp(m), sla.expm(m), atol=1e-10)


@FAST
@given(sizes, seeds, st.integers(min_value=1, max_value=6))
def test_pseudo_inverse_penrose_identities(n, seed, rank):
    """A A+ A = A and A+ A A+ = A+, including rank-deficient inputs."""
    a = random_psd(n, np.random.default_rng(seed), rank=min(rank, n))
    p = pseudo_inverse(a)
    scale = max(1.0, np.linalg.norm(a, 2))
    assert np.allclose(a @ p @ a, a, atol=1e-7 * scale)
    assert np.allclose(p @ a @ p, p, atol=1e-7 * max(1.0, np.linalg.norm(p, 2)))


def test_pseudo_inverse_of_rank_one():
    v = np.array([[1.0], [2.0j]])
    m = v @ dagger(v)
    assert np.allclose(pseudo_inverse(m), m / 25.0, atol=1e-14)


# ---------------------------------------------------------------------------
# PSD tests, ranges and kernels
# ---------------------------------------------------------------------------


def test_psd_check_passes_within_slack():
    tol = Tolerance(psd_slack=1e-9, eq_abs=1e-9)
    report = psd_check(np.diag([1.0, -5e-10]), tol)
    assert report.is_psd
    assert report.min_eigenvalue == pytest.approx(-5e-10)


def test_psd_check_fails_beyond_slack():
    report = psd_check(np.diag([1.0, -1e-6]))
    assert not report
    with pytest.raises(NotPSD):
        require_psd(np.diag([1.0, -1e-6]))


def test_psd_slack_is_relative_to_reference_scale():
    """A tiny negative eigenvalue is round-off only next to a matrix of larger norm."""
    m = np.diag([0.0, -1e-12])
    assert not psd_check(m)
    assert psd_check(m, scale=1.0)
    assert psd_check(1e-12 * np.diag([1.0, -1e-10]))


@pytest.mark.parametrize("c", [1.0, 1e-6, 1e-10, 1e6])
def test_spectral_split_is_scale_invariant(c):
    evals, rng_basis, ker = spectral_split(c * np.diag([2.0, 1.0, 0.0]))
    assert rng_basis.shape[1] == 2
    assert ker.shape[1] == 1
    assert np.allclose(evals / c, [2.0, 1.0], atol=1e-12)


def test_spectral_split_of_zero_has_no_range():
    evals, rng_basis, ker = spectral_split(np.zeros((3, 3)))
    assert evals.size == 0
    assert rng_basis.shape[1] == 0
    assert ker.shape[1] == 3


@FAST
@given(sizes, seeds, st.integers(min_value=1, max_value=6))
def test_spectral_split_partitions_space(n, seed, rank):
    rank = min(rank, n)
    m = random_psd(n, np.random.default_rng(seed), rank=rank)
    evals, rng_basis, ker = spectral_split(m)
    assert rng_basis.shape[1] == rank == evals.shape[0]
    assert rng_basis.shape[1] + ker.shape[1] == n
    assert np.allclose(m @ ker, 0, atol=1e-8 * max(1.0, np.linalg.norm(m, 2)))
    assert np.allclose(dagger(rng_basis) @ ker, 0, atol=1e-10)


def test_range_and_kernel_of_projection():
    p = np.diag([1.0, 0.0, 1.0]).astype(complex)
    assert range_basis(p).shape[1] == 2
    assert np.allclose(np.abs(kernel_basis(p)[:, 0]), [0, 1, 0])


def test_null_space_of_rectangular_matrix():
    m = np.array([[1, 1, 0], [0, 0, 1]], dtype=complex)
    ns = null_space(m)
    assert ns.shape == (3, 1)
    assert np.allclose(m @ ns, 0, atol=1e-12)


# ---------------------------------------------------------------------------
# Shorted operators and parallel sums
# ---------------------------------------------------------------------------


def test_short_of_two_by_two_is_schur_complement():
    g = np.array([[2.0, 1.0], [1.0, 1.0]], dtype=complex)
    s = np.array([[1.0], [0.0]], dtype=complex)
    assert np.allclose(shorted_operator(g, s), np.diag([1.0, 0.0]), atol=1e-14)


def test_short_onto_nothing_and_everything():
    g = random_psd(3, np.random.default_rng(1))
    assert np.allclose(shorted_operator(g, np.zeros((3, 0))), 0)
    assert np.allclose(shorted_operator(g, np.eye(3)), g, atol=1e-12)


@FAST
@given(st.integers(min_value=2, max_value=6), seeds, st.integers(min_value=1, max_value=5))
def test_short_is_below_with_range_in_subspace(n, seed, k):
    """The short is PSD, below g and supported on span(s)."""
    rng = np.random.default_rng(seed)
    g = random_psd(n, rng, rank=max(1, n - 1))
    k = min(k, n - 1)
    s = np.linalg.qr(random_matrix(n, rng, k))[0]
    short = shorted_operator(g, s)
    scale = max(1.0, np.linalg.norm(g, 2))
    assert _psd_residual(short) <= 1e-8 * scale
    assert _psd_residual(g - short) <= 1e-8 * scale
    perp = np.eye(n) - s @ dagger(s)
    assert np.allclose(perp @ short, 0, atol=1e-8 * scale)


def test_short_is_idempotent():
    rng = np.random.default_rng(11)
    g = random_psd(4, rng)
    s = np.linalg.qr(random_matrix(4, rng, 2))[0]
    once = shorted_operator(g, s)
    assert np.allclose(shorted_operator(once, s), once, atol=1e-10)


@pytest.mark.parametrize("c", [1e-10, 1e6])
def test_short_commutes_with_scaling(c):
    rng = np.random.default_rng(12)
    g = random_psd(4, rng, rank=3)
    s = np.linalg.qr(random_matrix(4, rng, 2))[0]
    assert np.allclose(shorted_operator(c * g, s) / c, shorted_operator(g, s), atol=1e-9)


def test_shorted_operator_rejects_non_psd():
    with pytest.raises(NotPSD):
        shorted_operator(np.diag([1.0, -1.0]), np.eye(2)[:, :1])


@FAST
@given(sizes, seeds)
def test_parallel_sum_of_invertibles_is_harmonic(n, seed):
    """For invertible a, b: a:b = (a^-1 + b^-1)^-1."""
    rng = np.random.default_rng(seed)
    a = random_psd(n, rng) + 0.5 * np.eye(n)
    b = random_psd(n, rng) + 0.5 * np.eye(n)
    expected = np.linalg.inv(np.linalg.inv(a) + np.linalg.inv(b))
    assert np.allclose(parallel_sum(a, b), expected, atol=1e-9 * np.linalg.norm(a, 2))
    assert np.allclose(parallel_sum(a, b), parallel_sum(b, a), atol=1e-9 * np.linalg.norm(a, 2))


def test_parallel_sum_with_self_halves():
    a = random_psd(3, np.random.default_rng(2))
    assert np.allclose(parallel_sum(a, a), a / 2, atol=1e-10)


def test_parallel_sum_of_orthogonal_supports_vanishes():
    a = np.diag([1.0, 0.0]).astype(complex)
    b = np.diag([0.0, 3.0]).astype(complex)
    assert np.allclose(parallel_sum(a, b), 0, atol=1e-14)


def test_parallel_sum_shape_mismatch():
    with pytest.raises(InvalidMatrix):
        parallel_sum(np.eye(2), np.eye(3))


# ---------------------------------------------------------------------------
# Ando iterates
# ---------------------------------------------------------------------------


def test_ando_iterates_increase_to_the_short():
    """a:(2^k b) increases with k and approaches the short of a onto range(b)."""
    rng = np.random.default_rng(5)
    a = random_psd(4, rng) + 0.1 * np.eye(4)
    b = random_psd(4, rng, rank=2)
    iterates = ando_iterates(a, b, range(0, 60, 4))
    for lo, hi in zip(iterates, iterates[1:]):
        assert _psd_residual(hi - lo) <= 1e-9
    limit = shorted_operator(a, range_basis(b))
    assert np.allclose(iterates[-1], limit, atol=1e-8)


@pytest.mark.parametrize("n", [2, 3, 5, 7, 10])
@pytest.mark.parametrize("seed", range(3))
def test_ando_limit_on_random_pairs(n, seed):
    rng = np.random.default_rng(100 * n + seed)
    a = random_psd(n, rng) + 0.1 * np.eye(n)
    b = random_psd(n, rng, rank=max(1, n // 2))
    limit = shorted_operator(a, range_basis(b))
    scale = np.linalg.norm(a, 2)
    assert np.allclose(ando_iterates(a, b, [60])[0], limit, atol=1e-7 * scale)


def test_ando_iterates_match_parallel_sum_for_small_k():
    rng = np.random.default_rng(6)
    a = random_psd(3, rng)
    b = random_psd(3, rng, rank=1)
    for k, term in zip((0, 1, 3), ando_iterates(a, b, (0, 1, 3))):
        assert np.allclose(term, parallel_sum(a, 2.0**k * b), atol=1e-9)


def test_ando_iterates_of_zero():
    out = ando_iterates(np.zeros((2, 2)), np.eye(2), [0, 5])
    assert len(out) == 2
    assert all(np.allclose(m, 0) for m in out)


def test_default_tolerance_values():
    assert DEFAULT_TOLERANCE.rank_rel == 1e-9
    assert DEFAULT_TOLERANCE.eq_abs == 1e-9
    assert DEFAULT_TOLERANCE.psd_slack == 1e-9
