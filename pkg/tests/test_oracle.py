import numpy as np
import pytest

from trilattice.basis import build_basis, cart_to_tri, materialize_dense, tri_to_cart
from trilattice.cvp import decompose
from trilattice.oracle import brute_force_cvp


def test_origin():
    res = brute_force_cvp(build_basis(3), np.zeros(3))
    assert res.best_coeffs.tolist() == [0, 0, 0]
    assert res.best_dist_sq == 0.0
    assert res.runner_up_gap > 0


def test_midpoint_is_a_tie():
    res = brute_force_cvp(build_basis(2), [0.5, 0.0])
    assert res.best_dist_sq == pytest.approx(0.25, abs=1e-15)
    assert res.runner_up_gap == pytest.approx(0.0, abs=1e-15)
    assert res.best_coeffs.tolist() in ([0, 0], [1, 0])


def test_one_dimension():
    res = brute_force_cvp(build_basis(1), [2.3])
    assert res.best_coeffs.tolist() == [2]
    assert res.best_dist_sq == pytest.approx(0.09)
    assert res.runner_up_gap == pytest.approx(0.49 - 0.09)


def test_optimum_is_a_sorted_prefix_candidate():
    rng = np.random.default_rng(4)
    b = build_basis(4)
    for _ in range(300):
        y = rng.uniform(-100, 100, 4)
        res = brute_force_cvp(b, y)
        dec = decompose(cart_to_tri(b, y))
        z = res.best_coeffs - dec.w
        assert set(z.tolist()) <= {0, 1}
        k = int(z.sum())
        order = np.argsort(-dec.r, kind="stable")
        if res.runner_up_gap > 1e-9:
            assert sorted(np.flatnonzero(z).tolist()) == sorted(order[:k].tolist())


@pytest.mark.parametrize("n", range(1, 6))
def test_window_stability(n):
    rng = np.random.default_rng(50 + n)
    b = build_basis(n)
    B = materialize_dense(b)
    for _ in range(500 if n < 5 else 100):
        y = rng.uniform(-100, 100, n)
        a = brute_force_cvp(b, y, window=2, dense=B)
        c = brute_force_cvp(b, y, window=3, dense=B)
        assert a.best_dist_sq == c.best_dist_sq


def test_window_grows_when_winner_on_boundary():
    b = build_basis(3)
    y = tri_to_cart(b, [0.9, 0.9, 0.9])  # nearest is (1, 1, 1), on the window-1 edge
    res = brute_force_cvp(b, y, window=1)
    assert res.window >= 2
    assert np.abs(res.best_coeffs - np.floor(cart_to_tri(b, y))).max() < res.window


def test_limits():
    with pytest.raises(ValueError):
        brute_force_cvp(build_basis(11), np.zeros(11))
    with pytest.raises(ValueError):
        brute_force_cvp(build_basis(2), np.zeros(2), window=0)
    with pytest.raises(ValueError):
        brute_force_cvp(build_basis(2), np.zeros(3))
