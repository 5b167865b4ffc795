import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvtradeoff.eigensolver import (
    ConvergenceError,
    block_scan,
    dominant_eig,
    full_space_operator,
    small_n_crosscheck,
)
from cvtradeoff.operators import build_r, build_rf, build_rg
from cvtradeoff.schmidt import DomainError


def two_by_two_top(a, b, d):
    """Largest eigenvalue of [[a, b], [b, d]] in closed form."""
    return (a + d) / 2 + math.sqrt(((a - d) / 2) ** 2 + b * b)


def test_diagonal():
    res = dominant_eig(np.diag([0.5, 0.25]))
    assert res.eigenvalue == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(res.eigenvector, [1.0, 0.0], atol=1e-6)


def test_two_by_two():
    res = dominant_eig(build_r(0.5, 0, 2))
    expected = two_by_two_top(0.5, 0.125, 0.25)
    assert expected == pytest.approx((3 + math.sqrt(2)) / 8, abs=1e-15)
    assert res.eigenvalue == pytest.approx(expected, abs=1e-12)
    v = res.eigenvector
    assert v[0] > v[1] > 0


def test_perron_vector_and_residual():
    res = dominant_eig(build_r(0.6, 0, 80), tol=1e-12)
    v = res.eigenvector
    assert abs(np.dot(v, v) - 1) < 1e-14
    assert np.all(v >= -1e-12)
    assert res.residual <= 1e-11
    lam = np.linalg.eigvalsh(build_r(0.6, 0, 80).entries)[-1]
    assert res.eigenvalue == pytest.approx(lam, abs=1e-11)


def test_sign_canonicalized():
    res = dominant_eig(-np.array([[2.0, 0.0], [0.0, 1.0]]) + 3 * np.eye(2))
    assert res.eigenvector[np.argmax(np.abs(res.eigenvector))] > 0


def test_monotone_in_dimension():
    lams = [dominant_eig(build_rf(0, N)).eigenvalue for N in (4, 12, 50)]
    assert lams[0] < lams[1] < lams[2] < 1


def test_convergence_failure_reports_state():
    with pytest.raises(ConvergenceError) as info:
        dominant_eig(build_r(0.9, 0, 100), max_iter=5)
    assert info.value.iterations == 5
    assert info.value.eigenvalue > 0.5


def test_scan_errors_tagged():
    with pytest.raises(ConvergenceError) as info:
        block_scan(0.9, 100, 2, max_iter=5)
    assert info.value.p == 0.9 and info.value.L == 0


def test_scan_retries_slow_blocks():
    # the -1 and -2 blocks need more than 100 iterations at this size
    scan = block_scan(0.5, 40, 2, max_iter=100)
    assert scan.lambda_max == block_scan(0.5, 40, 2).lambda_max
    with pytest.raises(ConvergenceError):
        block_scan(0.5, 40, 2, max_iter=100, retry_factor=1)


def test_scan_p_zero():
    scan = block_scan(0.0, 30, 5)
    assert scan.lambda_max == pytest.approx(0.5, abs=1e-12)
    assert scan.L_star == 0
    assert scan.degeneracy == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(scan.optimal_state.coeffs[:3], [1, 0, 0], atol=1e-5)


def test_scan_two_dim():
    scan = block_scan(0.5, 2, 0)
    assert scan.lambda_max == pytest.approx((3 + math.sqrt(2)) / 8, abs=1e-12)
    c = scan.optimal_state.coeffs
    assert c[0] > c[1] > 0


def test_scan_domain():
    with pytest.raises(DomainError):
        block_scan(-0.1, 5, 1)


@pytest.mark.parametrize("p", np.linspace(0.0, 1.0, 11))
def test_rayleigh_split(p):
    scan = block_scan(float(p), 60, 4)
    v = scan.eigenvector
    F = v @ build_rf(scan.L_star, 60).entries @ v
    G = v @ build_rg(scan.L_star, 60).entries @ v
    assert p * F + (1 - p) * G == pytest.approx(scan.lambda_max, abs=1e-10)
    assert scan.lambda_max >= 0.5 - 1e-12
    assert scan.lambda_max == max(scan.eigenvalues.values())


def test_convex_in_p():
    ps = np.linspace(0, 1, 41)
    lam = np.array([block_scan(float(p), 40, 3).lambda_max for p in ps])
    second = lam[:-2] - 2 * lam[1:-1] + lam[2:]
    assert second.min() >= -1e-10


def test_monotone_truncation():
    for p in (0.2, 0.6, 0.95):
        lams = [block_scan(p, N, 2).lambda_max for N in range(1, 30)]
        assert all(b >= a - 1e-12 for a, b in zip(lams, lams[1:]))


def test_positive_blocks_never_win():
    for p in np.linspace(0.05, 1.0, 8):
        scan = block_scan(float(p), 40, 3, include_positive=True)
        assert scan.L_star == 0
        for L in (1, 2, 3):
            assert scan.eigenvalues[-L] >= scan.eigenvalues[L] - 1e-13


def test_deterministic():
    a = block_scan(0.73, 120, 4)
    b = block_scan(0.73, 120, 4)
    assert a.eigenvalues == b.eigenvalues
    assert np.array_equal(a.eigenvector, b.eigenvector)


def test_tie_break_independent_of_order():
    # at p=0 every negative block is the same diagonal matrix
    scan = block_scan(0.0, 10, 6, include_positive=True)
    assert len({scan.eigenvalues[-L] for L in range(7)}) == 1
    assert scan.L_star == 0


def test_full_space_is_symmetric_and_block_diagonal():
    N = 4
    R = full_space_operator(0.4, N)
    assert np.allclose(R, R.T, atol=1e-15)
    diff = np.subtract.outer(np.arange(N), np.arange(N)).ravel()
    mask = diff[:, None] != diff[None, :]
    assert np.all(R[mask] == 0)


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5, 6])
@pytest.mark.parametrize("p", [0.0, 0.25, 0.5, 0.8, 1.0])
def test_crosscheck_against_blocks(N, p):
    full = small_n_crosscheck(p, N)
    assert full == pytest.approx(block_scan(p, N, N - 1).lambda_max, abs=1e-10)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_full_spectrum_is_union_of_blocks(N):
    # product truncation n_in, n_out < N cuts block +-L down to N - |L| states
    p = 0.55
    full = np.sort(np.linalg.eigvalsh(full_space_operator(p, N)))
    parts = [np.linalg.eigvalsh(build_r(p, L, N - abs(L)).entries) for L in range(-(N - 1), N)]
    np.testing.assert_allclose(full, np.sort(np.concatenate(parts)), atol=1e-13)


def test_crosscheck_examples():
    assert small_n_crosscheck(0.0, 2) == pytest.approx(0.5, abs=1e-15)
    assert small_n_crosscheck(0.5, 2) == pytest.approx((3 + math.sqrt(2)) / 8, abs=1e-12)
    # the one-dimensional L = +-1 blocks hold p/4 + (1-p)/4 and p/4 + (1-p)/2
    assert build_r(0.5, 1, 1).entries[0, 0] == pytest.approx(0.25)
    assert build_r(0.5, -1, 1).entries[0, 0] == pytest.approx(0.375)
    with pytest.raises(ValueError):
        small_n_crosscheck(0.5, 7)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 1.0))
def test_crosscheck_random_p(p):
    assert small_n_crosscheck(p, 4) == pytest.approx(block_scan(p, 4, 3).lambda_max, abs=1e-10)
