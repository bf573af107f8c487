"""Discretization of the ball B_R: tensor grid, finite differences, pair sampling.

The grid is a Cartesian lattice clipped to the closed ball.  The resolution is
odd so the origin is always a node, and axis endpoints land exactly on |x| = R.
Derivatives use 2nd-order central stencils where the full stencil fits inside
the ball, 2nd-order one-sided stencils near the boundary, and a local
least-squares quadratic fit at the handful of nodes (e.g. the poles) whose
lattice line is too short for any 1-D stencil.  All three routes reproduce
polynomials of degree <= 2 exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

# Oracle giving exact derivative values: (beta, points) -> values.
DerivOracle = Callable[[tuple[int, ...], np.ndarray], np.ndarray]

_DEFAULT_PAIR_CAP = 200_000


@dataclass(eq=False)
class BallGrid:
    """Cartesian tensor grid clipped to the closed ball of radius R."""

    n: int
    R: float
    res: int
    h: float
    cell_volume: float
    nodes: np.ndarray        # (N, n) float coordinates
    lattice: np.ndarray      # (N, n) integer lattice indices
    index_map: np.ndarray    # (res,)*n -> node index, -1 outside the ball
    interior_mask: np.ndarray  # True where every unit-offset neighbor is a node
    origin_index: int
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def node_count(self) -> int:
        return self.nodes.shape[0]

    @property
    def boundary_mask(self) -> np.ndarray:
        return ~self.interior_mask

    def axis_neighbors(self, d: int, k: int) -> np.ndarray:
        """Node index at lattice offset k along axis d, -1 where absent."""
        key = ("nbr", d, k)
        if key not in self._cache:
            shifted = self.lattice.copy()
            shifted[:, d] += k
            self._cache[key] = self._lookup(shifted)
        return self._cache[key]

    def corner_neighbors(self, i: int, j: int, si: int, sj: int) -> np.ndarray:
        """Node index at lattice offset si*e_i + sj*e_j, -1 where absent."""
        key = ("corner", i, j, si, sj)
        if key not in self._cache:
            shifted = self.lattice.copy()
            shifted[:, i] += si
            shifted[:, j] += sj
            self._cache[key] = self._lookup(shifted)
        return self._cache[key]

    def _lookup(self, lat: np.ndarray) -> np.ndarray:
        ok = np.all((lat >= 0) & (lat < self.res), axis=1)
        out = np.full(lat.shape[0], -1, dtype=np.int64)
        if ok.any():
            out[ok] = self.index_map[tuple(lat[ok].T)]
        return out


def build_grid(n: int, R: float, res: int) -> BallGrid:
    """Build the clipped tensor grid on B_R.

    res must be odd and >= 5 so the origin is a node and one-sided stencils
    have room; nodes keep every lattice point with |x| <= R.
    """
    if n not in (2, 3):
        raise ValueError(f"n must be 2 or 3, got {n}")
    if not (R > 0) or not np.isfinite(R):
        raise ValueError(f"R must be positive and finite, got {R}")
    if res < 5 or res % 2 == 0:
        raise ValueError(f"res must be odd and >= 5, got {res}")

    axis = np.linspace(-R, R, res)
    h = 2.0 * R / (res - 1)
    lat_full = np.stack(
        np.meshgrid(*([np.arange(res)] * n), indexing="ij"), axis=-1
    ).reshape(-1, n)
    pts = axis[lat_full]
    r2 = np.einsum("ij,ij->i", pts, pts)
    keep = r2 <= R * R * (1.0 + 1e-12)
    lattice = np.ascontiguousarray(lat_full[keep])
    nodes = np.ascontiguousarray(pts[keep])
    N = nodes.shape[0]

    index_map = np.full((res,) * n, -1, dtype=np.int64)
    index_map[tuple(lattice.T)] = np.arange(N)

    center = (res - 1) // 2
    origin_index = int(index_map[(center,) * n])
    if origin_index < 0:  # pragma: no cover - origin is always inside
        raise RuntimeError("origin node missing")

    interior = np.ones(N, dtype=bool)
    for off in itertools.product((-1, 0, 1), repeat=n):
        if all(o == 0 for o in off):
            continue
        shifted = lattice + np.asarray(off)
        ok = np.all((shifted >= 0) & (shifted < res), axis=1)
        idx = np.full(N, -1, dtype=np.int64)
        if ok.any():
            idx[ok] = index_map[tuple(shifted[ok].T)]
        interior &= idx >= 0

    return BallGrid(
        n=n, R=float(R), res=res, h=h, cell_volume=h**n,
        nodes=nodes, lattice=lattice, index_map=index_map,
        interior_mask=interior, origin_index=origin_index,
    )


@dataclass(eq=False)
class ScalarField:
    """Scalar function sampled on the grid nodes.

    analytic_derivs, when present, maps (beta, points) to exact derivative
    values and is preferred over finite differences.
    """

    grid: BallGrid
    values: np.ndarray
    analytic_derivs: DerivOracle | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.grid.node_count,):
            raise ValueError(
                f"values shape {self.values.shape} does not match "
                f"node count {self.grid.node_count}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")


@dataclass(eq=False)
class VectorField:
    """Tuple of scalar components on a shared grid."""

    components: tuple[ScalarField, ...]

    def __post_init__(self):
        self.components = tuple(self.components)
        if not self.components:
            raise ValueError("VectorField needs at least one component")
        g = self.components[0].grid
        if any(c.grid is not g for c in self.components[1:]):
            raise ValueError("components must share one grid")

    @property
    def grid(self) -> BallGrid:
        return self.components[0].grid

    @property
    def m(self) -> int:
        return len(self.components)

    def values_matrix(self) -> np.ndarray:
        return np.stack([c.values for c in self.components], axis=1)


def field_from_callable(grid: BallGrid, fn, analytic_derivs=None) -> ScalarField:
    return ScalarField(grid, np.asarray(fn(grid.nodes), dtype=np.float64),
                       analytic_derivs=analytic_derivs)


def vector_field_from_matrix(grid: BallGrid, values: np.ndarray) -> VectorField:
    values = np.asarray(values, dtype=np.float64)
    return VectorField(tuple(ScalarField(grid, values[:, c])
                             for c in range(values.shape[1])))


# ---------------------------------------------------------------------------
# finite differences


def _canonical_beta(n: int, beta) -> tuple[int, ...]:
    beta = tuple(int(b) for b in beta)
    if len(beta) != n or any(b < 0 for b in beta):
        raise ValueError(f"bad multi-index {beta} for n={n}")
    if sum(beta) > 2:
        raise ValueError(f"only derivatives of order <= 2 supported, got {beta}")
    return beta


def _monomials(n: int) -> list[tuple[int, ...]]:
    mono = [tuple(0 for _ in range(n))]
    for d in range(n):
        e = [0] * n
        e[d] = 1
        mono.append(tuple(e))
    for i in range(n):
        for j in range(i, n):
            e = [0] * n
            e[i] += 1
            e[j] += 1
            mono.append(tuple(e))
    return mono


def _lsq_plan(grid: BallGrid, node: int):
    """Neighbors and quadratic-fit weights for a stencil-starved node."""
    key = ("lsq", node)
    if key in grid._cache:
        return grid._cache[key]
    mono = _monomials(grid.n)
    nm = len(mono)
    d2 = np.einsum("ij,ij->i", grid.nodes - grid.nodes[node],
                   grid.nodes - grid.nodes[node])
    keys = tuple(grid.lattice[:, d] for d in range(grid.n - 1, -1, -1)) + (d2,)
    order = np.lexsort(keys)
    K = min(grid.node_count, 2 * nm)
    while True:
        nbr = order[:K]
        xi = (grid.nodes[nbr] - grid.nodes[node]) / grid.h
        V = np.column_stack([np.prod(xi**np.asarray(e), axis=1) for e in mono])
        if np.linalg.matrix_rank(V) == nm or K >= grid.node_count:
            break
        K = min(grid.node_count, K + nm)
    W = np.linalg.pinv(V)
    plan = (nbr, W, {e: i for i, e in enumerate(mono)})
    grid._cache[key] = plan
    return plan


def _lsq_derivative(grid: BallGrid, vals: np.ndarray, nodes: np.ndarray,
                    beta: tuple[int, ...], out: np.ndarray) -> None:
    order = sum(beta)
    fact = 1.0
    for b in beta:
        for k in range(2, b + 1):
            fact *= k
    for node in nodes:
        nbr, W, pos = _lsq_plan(grid, int(node))
        coef = W @ vals[nbr]
        out[node] = coef[pos[beta]] * fact / grid.h**order


def _first_derivative(grid: BallGrid, vals: np.ndarray, d: int) -> np.ndarray:
    h = grid.h
    p1 = grid.axis_neighbors(d, 1)
    m1 = grid.axis_neighbors(d, -1)
    p2 = grid.axis_neighbors(d, 2)
    m2 = grid.axis_neighbors(d, -2)
    out = np.empty_like(vals)
    central = (p1 >= 0) & (m1 >= 0)
    fwd = ~central & (p1 >= 0) & (p2 >= 0)
    bwd = ~central & ~fwd & (m1 >= 0) & (m2 >= 0)
    rest = ~(central | fwd | bwd)
    out[central] = (vals[p1[central]] - vals[m1[central]]) / (2 * h)
    if fwd.any():
        out[fwd] = (-3 * vals[fwd] + 4 * vals[p1[fwd]] - vals[p2[fwd]]) / (2 * h)
    if bwd.any():
        out[bwd] = (3 * vals[bwd] - 4 * vals[m1[bwd]] + vals[m2[bwd]]) / (2 * h)
    if rest.any():
        beta = tuple(1 if k == d else 0 for k in range(grid.n))
        _lsq_derivative(grid, vals, np.nonzero(rest)[0], beta, out)
    return out


def _second_pure(grid: BallGrid, vals: np.ndarray, d: int) -> np.ndarray:
    h2 = grid.h**2
    p1 = grid.axis_neighbors(d, 1)
    m1 = grid.axis_neighbors(d, -1)
    p2 = grid.axis_neighbors(d, 2)
    m2 = grid.axis_neighbors(d, -2)
    p3 = grid.axis_neighbors(d, 3)
    m3 = grid.axis_neighbors(d, -3)
    out = np.empty_like(vals)
    central = (p1 >= 0) & (m1 >= 0)
    fwd = ~central & (p1 >= 0) & (p2 >= 0) & (p3 >= 0)
    bwd = ~central & ~fwd & (m1 >= 0) & (m2 >= 0) & (m3 >= 0)
    rest = ~(central | fwd | bwd)
    out[central] = (vals[p1[central]] - 2 * vals[central] + vals[m1[central]]) / h2
    if fwd.any():
        out[fwd] = (2 * vals[fwd] - 5 * vals[p1[fwd]]
                    + 4 * vals[p2[fwd]] - vals[p3[fwd]]) / h2
    if bwd.any():
        out[bwd] = (2 * vals[bwd] - 5 * vals[m1[bwd]]
                    + 4 * vals[m2[bwd]] - vals[m3[bwd]]) / h2
    if rest.any():
        beta = tuple(2 if k == d else 0 for k in range(grid.n))
        _lsq_derivative(grid, vals, np.nonzero(rest)[0], beta, out)
    return out


def _second_mixed(grid: BallGrid, vals: np.ndarray, i: int, j: int) -> np.ndarray:
    h2 = grid.h**2
    pp = grid.corner_neighbors(i, j, 1, 1)
    pm = grid.corner_neighbors(i, j, 1, -1)
    mp = grid.corner_neighbors(i, j, -1, 1)
    mm = grid.corner_neighbors(i, j, -1, -1)
    out = np.empty_like(vals)
    full = (pp >= 0) & (pm >= 0) & (mp >= 0) & (mm >= 0)
    out[full] = (vals[pp[full]] - vals[pm[full]]
                 - vals[mp[full]] + vals[mm[full]]) / (4 * h2)
    rest = ~full
    if rest.any():
        beta = tuple((1 if k == i else 0) + (1 if k == j else 0)
                     for k in range(grid.n))
        _lsq_derivative(grid, vals, np.nonzero(rest)[0], beta, out)
    return out


def fd_values(grid: BallGrid, vals: np.ndarray, beta: tuple[int, ...]) -> np.ndarray:
    """Finite-difference derivative of raw node values (no oracle shortcut)."""
    beta = _canonical_beta(grid.n, beta)
    order = sum(beta)
    if order == 0:
        return vals.copy()
    if order == 1:
        return _first_derivative(grid, vals, beta.index(1))
    if 2 in beta:
        return _second_pure(grid, vals, beta.index(2))
    i, j = [k for k, b in enumerate(beta) if b == 1]
    return _second_mixed(grid, vals, i, j)


def fd_derivative(field: ScalarField, beta) -> ScalarField:
    """Derivative field for a multi-index with |beta| <= 2.

    Exact values are copied from the field's analytic oracle when present;
    otherwise the stencil hierarchy documented in the module docstring runs.
    """
    grid = field.grid
    beta = _canonical_beta(grid.n, beta)
    if field.analytic_derivs is not None:
        vals = np.asarray(field.analytic_derivs(beta, grid.nodes), dtype=np.float64)
        if vals.shape != (grid.node_count,):
            raise ValueError("analytic_derivs returned a bad shape")
        return ScalarField(grid, vals)
    return ScalarField(grid, fd_values(grid, field.values, beta))


def laplacian(field: ScalarField) -> ScalarField:
    """Sum of pure second derivatives; trust it on interior nodes."""
    grid = field.grid
    total = np.zeros(grid.node_count)
    for d in range(grid.n):
        beta = tuple(2 if k == d else 0 for k in range(grid.n))
        total += fd_derivative(field, beta).values
    return ScalarField(grid, total)


# ---------------------------------------------------------------------------
# pair sampling for discrete Hölder seminorms


@dataclass(eq=False)
class PairSet:
    """Node-index pairs used for discrete Hölder seminorms.

    Always contains every antipodal pair (x, -x) and every (node, origin)
    pair; when the grid is small enough all pairs are used, otherwise the
    remainder is drawn from a seeded generator up to the cap.
    """

    grid: BallGrid
    first: np.ndarray
    second: np.ndarray
    dist: np.ndarray
    seed: int
    cap: int
    complete: bool
    _pow_cache: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return self.first.shape[0]

    def dist_pow(self, alpha: float) -> np.ndarray:
        key = float(alpha)
        if key not in self._pow_cache:
            self._pow_cache[key] = self.dist**key
        return self._pow_cache[key]

    @classmethod
    def from_pairs(cls, grid: BallGrid, first, second,
                   seed: int = 0, cap: int = 0) -> "PairSet":
        first = np.asarray(first, dtype=np.int64)
        second = np.asarray(second, dtype=np.int64)
        if first.shape != second.shape or first.ndim != 1:
            raise ValueError("pair index arrays must be 1-D and equal length")
        if np.any(first == second):
            raise ValueError("pairs must join distinct nodes")
        diff = grid.nodes[first] - grid.nodes[second]
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        return cls(grid=grid, first=first, second=second, dist=dist,
                   seed=seed, cap=cap or first.shape[0], complete=False)


def build_pair_set(grid: BallGrid, seed: int = 0,
                   cap: int = _DEFAULT_PAIR_CAP) -> PairSet:
    N = grid.node_count
    if cap < 2 * N:
        raise ValueError(f"pair cap {cap} too small for {N} nodes")
    total = N * (N - 1) // 2
    if total <= cap:
        iu, ju = np.triu_indices(N, k=1)
        ps = PairSet.from_pairs(grid, iu, ju, seed=seed, cap=cap)
        ps.complete = True
        return ps

    # forced pairs: antipodes and rays to the origin
    anti_lat = (grid.res - 1) - grid.lattice
    anti = grid.index_map[tuple(anti_lat.T)]
    idx = np.arange(N)
    mask = (anti >= 0) & (idx < anti)
    firsts = [idx[mask]]
    seconds = [anti[mask]]
    o = grid.origin_index
    not_o = idx[idx != o]
    firsts.append(not_o)
    seconds.append(np.full(not_o.shape[0], o, dtype=np.int64))

    forced = int(sum(a.shape[0] for a in firsts))
    rng = np.random.default_rng(seed)
    need = cap - forced
    draws = []
    got = 0
    while got < need:
        a = rng.integers(0, N, size=need - got + 1024)
        b = rng.integers(0, N, size=need - got + 1024)
        ok = a != b
        a, b = a[ok], b[ok]
        take = min(a.shape[0], need - got)
        draws.append((a[:take], b[:take]))
        got += take
    firsts.extend(d[0] for d in draws)
    seconds.extend(d[1] for d in draws)
    return PairSet.from_pairs(grid, np.concatenate(firsts),
                              np.concatenate(seconds), seed=seed, cap=cap)
