"""Newtonian potential quadrature against closed forms and exact identities."""

import numpy as np
import pytest

from jetsolve import (
    build_grid,
    build_pair_set,
    check_potential_norm_bound,
    constant_probe,
    field_from_callable,
    laplacian_consistency,
    newtonian_potential,
    potential_gradient,
    potential_hessian,
    potential_probes,
    quad_weights,
    uniform_ball_potential,
)


def _rel_sup(got, want):
    return np.abs(got - want).max() / max(np.abs(want).max(), 1e-300)


# ---------------------------------------------------------------------------
# closed-form fixture


@pytest.mark.parametrize("n,res,tol", [(3, 17, 0.03), (2, 17, 0.03), (2, 25, 0.02)])
def test_constant_source_matches_closed_form(n, res, tol):
    grid = build_grid(n, 1.0, res)
    pf = newtonian_potential(constant_probe(n).field(grid))
    want = np.array([uniform_ball_potential(n, 1.0, x) for x in grid.nodes])
    assert _rel_sup(pf.values, want) <= tol


def test_constant_source_error_decreases_with_resolution():
    errs = []
    for res in (17, 25):
        grid = build_grid(3, 1.0, res)
        pf = newtonian_potential(constant_probe(3).field(grid))
        want = np.array([uniform_ball_potential(3, 1.0, x) for x in grid.nodes])
        errs.append(_rel_sup(pf.values, want))
    assert errs[1] < errs[0]


def test_quad_weights_sum_to_ball_volume():
    for n, vol in ((2, np.pi), (3, 4 * np.pi / 3)):
        grid = build_grid(n, 1.0, 17)
        w = quad_weights(grid)
        assert w.sum() == pytest.approx(vol, rel=1e-12)
        assert np.all(w >= 0)


def test_gradient_of_constant_source():
    # N(1) = R^2/2 - |x|^2/6 in 3-d, so grad N(1) = -x/3
    grid = build_grid(3, 1.0, 17)
    pf = potential_gradient(constant_probe(3).field(grid))
    want = -grid.nodes / 3.0
    err = np.abs(pf.grad - want).max(axis=1)
    r = np.linalg.norm(grid.nodes, axis=1)
    # clipped-cell weights concentrate the quadrature error at the rim
    assert err[r < 0.8].max() <= 0.005
    assert err.max() <= 0.05


def test_hessian_trace_recovers_source_exactly():
    # the second-derivative kernel is traceless and the diagonal carries
    # -f/n explicitly, so the trace identity is machine-exact
    grid = build_grid(2, 1.0, 13)
    f = field_from_callable(grid, lambda p: np.sin(p[:, 0]) + p[:, 1] ** 2)
    pf = potential_hessian(f)
    trace = np.einsum("nii->n", pf.hess)
    np.testing.assert_allclose(trace, -f.values, atol=1e-12)


def test_hessian_symmetric():
    grid = build_grid(2, 1.0, 13)
    f = field_from_callable(grid, lambda p: np.exp(0.3 * p[:, 0]) * p[:, 1])
    pf = potential_hessian(f)
    np.testing.assert_allclose(pf.hess, np.transpose(pf.hess, (0, 2, 1)),
                               atol=1e-12)


# ---------------------------------------------------------------------------
# two-route consistency


@pytest.mark.parametrize("make", [
    lambda p: np.ones(p.shape[0]),
    lambda p: p[:, 0],
    lambda p: np.sin(p[:, 0]),
])
def test_laplacian_routes_agree(make):
    grid = build_grid(2, 1.0, 21)
    rep = laplacian_consistency(field_from_callable(grid, make), grid)
    assert rep["max_relative_gap"] <= 0.05


def test_laplacian_consistency_keys():
    grid = build_grid(2, 1.0, 13)
    rep = laplacian_consistency(field_from_callable(grid, lambda p: p[:, 0]))
    for key in ("trace_gap", "fd_gap", "route_gap", "max_relative_gap"):
        assert key in rep and np.isfinite(rep[key])


# ---------------------------------------------------------------------------
# norm-bound ratios


def test_potential_norm_ratio_stable_across_radii():
    # the order-2 norm of N(f) against the weighted norm of f should not
    # drift as the ball shrinks; check a 4x radius range at fixed res
    ratios = []
    for R in (1.0, 0.25):
        grid = build_grid(2, R, 17)
        pairs = build_pair_set(grid, seed=0)
        rep = check_potential_norm_bound(potential_probes(2), grid, 0.5,
                                         pairs=pairs)
        ratios.append(rep.max_ratio)
    hi, lo = max(ratios), min(ratios)
    assert hi / lo < 3.0
    assert hi < 10.0


def test_potential_accepts_raw_arrays():
    grid = build_grid(2, 1.0, 9)
    pf = newtonian_potential(np.ones(grid.node_count), grid)
    assert pf.values.shape == (grid.node_count,)
    assert np.all(np.isfinite(pf.values))
