"""Grid geometry, finite differences, and pair sampling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetsolve import (
    PairSet,
    ScalarField,
    ball_lattice_count,
    build_grid,
    build_pair_set,
    fd_values,
    field_from_callable,
    laplacian,
    vector_field_from_matrix,
)


# ---------------------------------------------------------------------------
# lattice geometry


@pytest.mark.parametrize("n,R,res", [(2, 1.0, 9), (2, 0.5, 17), (2, 2.0, 21),
                                     (3, 1.0, 9), (3, 1.5, 13)])
def test_node_count_matches_independent_enumeration(n, R, res):
    grid = build_grid(n, R, res)
    assert grid.node_count == ball_lattice_count(n, R, res)


def test_origin_node_is_exact(grid2, grid3):
    for grid in (grid2, grid3):
        assert np.all(grid.nodes[grid.origin_index] == 0.0)


def test_axis_endpoints_present(grid2):
    # the closed ball includes (+-R, 0) exactly when res is odd
    coords = grid2.nodes
    for d in range(2):
        for s in (-1.0, 1.0):
            target = np.zeros(2)
            target[d] = s * grid2.R
            hit = np.all(np.abs(coords - target) < 1e-12, axis=1)
            assert hit.any()


def test_nodes_inside_closed_ball(grid3):
    r2 = np.einsum("ij,ij->i", grid3.nodes, grid3.nodes)
    assert np.all(r2 <= grid3.R**2 * (1 + 1e-12))


def test_interior_mask_means_all_neighbors_exist(grid2):
    for d in range(grid2.n):
        for k in (-1, 1):
            nbr = grid2.axis_neighbors(d, k)
            assert np.all(nbr[grid2.interior_mask] >= 0)
    # boundary nodes are missing at least one neighbor in the full unit box
    # (corners count: the cross-derivative stencil needs them)
    missing = np.zeros(grid2.node_count, dtype=bool)
    for d in range(grid2.n):
        for k in (-1, 1):
            missing |= grid2.axis_neighbors(d, k) < 0
    for si in (-1, 1):
        for sj in (-1, 1):
            missing |= grid2.corner_neighbors(0, 1, si, sj) < 0
    assert np.all(missing[grid2.boundary_mask])


def test_axis_neighbor_coordinates(grid2):
    nbr = grid2.axis_neighbors(0, 1)
    ok = nbr >= 0
    shifted = grid2.nodes[ok].copy()
    shifted[:, 0] += grid2.h
    np.testing.assert_allclose(grid2.nodes[nbr[ok]], shifted, atol=1e-12)


def test_corner_neighbors_compose_axis_steps(grid2):
    ij = grid2.corner_neighbors(0, 1, 1, -1)
    step0 = grid2.axis_neighbors(0, 1)
    ok = (ij >= 0) & (step0 >= 0)
    # one step along axis 0 then one along axis 1 lands on the corner node
    second = np.full(grid2.node_count, -1, dtype=np.int64)
    nbr1 = grid2.axis_neighbors(1, -1)
    second[ok] = nbr1[step0[ok]]
    np.testing.assert_array_equal(second[ok], ij[ok])


# ---------------------------------------------------------------------------
# finite differences


def _random_quadratic(rng, n):
    A = rng.normal(size=(n, n))
    A = (A + A.T) / 2
    b = rng.normal(size=n)
    c = rng.normal()

    def fn(pts):
        return np.einsum("ki,ij,kj->k", pts, A, pts) + pts @ b + c

    return A, b, c, fn


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_fd_exact_on_quadratics(data_seed):
    rng = np.random.default_rng(data_seed)
    grid = build_grid(2, 1.0, 9)
    A, b, c, fn = _random_quadratic(rng, 2)
    vals = fn(grid.nodes)
    scale = max(1.0, np.abs(vals).max())
    interior = grid.interior_mask
    for beta, exact in [
        ((1, 0), 2 * (grid.nodes @ A)[:, 0] + b[0]),
        ((0, 1), 2 * (grid.nodes @ A)[:, 1] + b[1]),
        ((2, 0), np.full(grid.node_count, 2 * A[0, 0])),
        ((0, 2), np.full(grid.node_count, 2 * A[1, 1])),
        ((1, 1), np.full(grid.node_count, 2 * A[0, 1])),
    ]:
        got = fd_values(grid, vals, beta)
        err = np.abs(got - exact)[interior].max()
        assert err <= 1e-8 * scale


def test_fd_values_everywhere_finite(grid3, rng):
    vals = rng.normal(size=grid3.node_count)
    for beta in [(1, 0, 0), (0, 0, 2), (1, 1, 0), (0, 1, 1)]:
        out = fd_values(grid3, vals, beta)
        assert np.all(np.isfinite(out))


def test_fd_rejects_bad_multi_index(grid2):
    with pytest.raises(ValueError):
        fd_values(grid2, np.zeros(grid2.node_count), (3, 0))
    with pytest.raises(ValueError):
        fd_values(grid2, np.zeros(grid2.node_count), (1, 0, 0))


def test_laplacian_of_quadratic_is_constant(grid2):
    f = field_from_callable(grid2, lambda p: p[:, 0] ** 2 - 3 * p[:, 1] ** 2)
    lap = laplacian(f)
    got = lap.values[grid2.interior_mask]
    np.testing.assert_allclose(got, -4.0, atol=1e-9)


# ---------------------------------------------------------------------------
# fields


def test_scalar_field_validates_shape_and_finiteness(grid2):
    with pytest.raises(ValueError):
        ScalarField(grid2, np.zeros(grid2.node_count - 1))
    bad = np.zeros(grid2.node_count)
    bad[0] = np.nan
    with pytest.raises(ValueError):
        ScalarField(grid2, bad)


def test_vector_field_round_trip(grid2, rng):
    mat = rng.normal(size=(grid2.node_count, 3))
    vf = vector_field_from_matrix(grid2, mat)
    assert vf.m == 3
    np.testing.assert_array_equal(vf.values_matrix(), mat)


def test_vector_field_requires_shared_grid(grid2):
    other = build_grid(2, 1.0, 9)
    from jetsolve import VectorField

    a = ScalarField(grid2, np.zeros(grid2.node_count))
    b = ScalarField(other, np.zeros(other.node_count))
    with pytest.raises(ValueError):
        VectorField((a, b))


# ---------------------------------------------------------------------------
# pair sets


def test_small_grid_uses_all_pairs():
    grid = build_grid(2, 1.0, 9)
    ps = build_pair_set(grid, seed=0)
    assert ps.complete
    N = grid.node_count
    assert ps.size == N * (N - 1) // 2


def test_pair_cap_respected():
    grid = build_grid(3, 1.0, 17)
    cap = 50_000
    ps = build_pair_set(grid, seed=0, cap=cap)
    assert not ps.complete
    assert ps.size <= cap
    assert np.all(ps.first != ps.second)
    assert np.all(ps.dist > 0)


def test_antipodal_and_origin_pairs_forced():
    grid = build_grid(3, 1.0, 17)
    ps = build_pair_set(grid, seed=0, cap=50_000)
    # the origin must touch every other node
    o = grid.origin_index
    touched = set(ps.second[ps.first != ps.second][ps.first[ps.first != ps.second] != o])
    joined = np.zeros(grid.node_count, dtype=bool)
    joined[ps.first[ps.second == o]] = True
    joined[ps.second[ps.first == o]] = True
    joined[o] = True
    assert joined.all()
    # every axis endpoint pairs with its antipode
    for d in range(grid.n):
        e = np.zeros(grid.n)
        e[d] = grid.R
        i = int(np.where(np.all(np.abs(grid.nodes - e) < 1e-12, axis=1))[0][0])
        j = int(np.where(np.all(np.abs(grid.nodes + e) < 1e-12, axis=1))[0][0])
        hit = ((ps.first == i) & (ps.second == j)) | ((ps.first == j) & (ps.second == i))
        assert hit.any()


def test_pair_set_deterministic():
    grid = build_grid(3, 1.0, 17)
    a = build_pair_set(grid, seed=7, cap=50_000)
    b = build_pair_set(grid, seed=7, cap=50_000)
    np.testing.assert_array_equal(a.first, b.first)
    np.testing.assert_array_equal(a.second, b.second)


def test_from_pairs_rejects_degenerate():
    grid = build_grid(2, 1.0, 9)
    with pytest.raises(ValueError):
        PairSet.from_pairs(grid, [0, 1], [0, 1])
