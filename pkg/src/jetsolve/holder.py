"""Discrete weighted Hölder norms and the executable norm lemmas.

The scale-invariant weighted norm on B_R is

    ||f||_a = sup |f| + (2R)^a * H_a[f],

with H_a the Hölder seminorm; the order-l jet norm takes the max of ||.||_a
over all derivatives of order exactly l, and vector fields take the max over
components.  Seminorms are evaluated on a PairSet, so every reported value
is reproducible from (grid, seed, cap).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .grid import BallGrid, PairSet, ScalarField, VectorField, fd_values

_EPS = 1e-12


@dataclass(frozen=True)
class HolderReport:
    sup_norm: float
    seminorm: float
    weighted: float
    alpha: float
    n_pairs: int


@dataclass(frozen=True)
class JetNormReport:
    """Weighted jet norms by derivative order (l = 0, 1, 2)."""

    orders: tuple[float, float, float]
    alpha: float
    n_pairs: int

    @property
    def solver_norm(self) -> float:
        """The order-2 norm: the metric the fixed-point iteration lives in."""
        return self.orders[2]


def _check_alpha(alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return float(alpha)


def weighted_norm_values(values: np.ndarray, alpha: float,
                         pairs: PairSet) -> tuple[float, float, float]:
    """(sup, seminorm, weighted) for raw node values."""
    sup = float(np.abs(values).max())
    semi = float((np.abs(values[pairs.first] - values[pairs.second])
                  / pairs.dist_pow(alpha)).max())
    weighted = sup + (2.0 * pairs.grid.R) ** alpha * semi
    return sup, semi, weighted


def holder_norm(field: ScalarField, alpha: float, pairs: PairSet) -> HolderReport:
    """Weighted Hölder norm of a scalar field over the pair set."""
    alpha = _check_alpha(alpha)
    if field.grid is not pairs.grid:
        raise ValueError("field and pairs live on different grids")
    sup, semi, weighted = weighted_norm_values(field.values, alpha, pairs)
    return HolderReport(sup, semi, weighted, alpha, pairs.size)


def multi_indices(n: int, order: int) -> list[tuple[int, ...]]:
    out = []
    for combo in itertools.combinations_with_replacement(range(n), order):
        beta = [0] * n
        for d in combo:
            beta[d] += 1
        out.append(tuple(beta))
    return out


def derivative_values(field: ScalarField, beta: tuple[int, ...]) -> np.ndarray:
    if field.analytic_derivs is not None:
        return np.asarray(field.analytic_derivs(beta, field.grid.nodes),
                          dtype=np.float64)
    return fd_values(field.grid, field.values, beta)


def jet_norm(field, alpha: float, pairs: PairSet) -> JetNormReport:
    """Weighted jet norms of a scalar or vector field for l = 0, 1, 2.

    Derivatives come from the analytic oracle when a component carries one
    and from finite differences otherwise.
    """
    alpha = _check_alpha(alpha)
    components = field.components if isinstance(field, VectorField) else (field,)
    grid = components[0].grid
    if grid is not pairs.grid:
        raise ValueError("field and pairs live on different grids")
    orders = []
    for order in (0, 1, 2):
        worst = 0.0
        for beta in multi_indices(grid.n, order):
            for comp in components:
                vals = derivative_values(comp, beta)
                _, _, weighted = weighted_norm_values(vals, alpha, pairs)
                worst = max(worst, weighted)
        orders.append(worst)
    return JetNormReport(tuple(orders), alpha, pairs.size)


def check_banach_algebra(f: ScalarField, g: ScalarField, alpha: float,
                         pairs: PairSet) -> bool:
    """Submultiplicativity ||fg|| <= ||f|| ||g|| of the weighted norm."""
    alpha = _check_alpha(alpha)
    prod = ScalarField(f.grid, f.values * g.values)
    nf = holder_norm(f, alpha, pairs).weighted
    ng = holder_norm(g, alpha, pairs).weighted
    nfg = holder_norm(prod, alpha, pairs).weighted
    return nfg <= nf * ng * (1.0 + _EPS) + _EPS


def taylor_remainder_ratio(field: ScalarField, alpha: float,
                           pairs: PairSet) -> float:
    """Worst ratio of remainder to bound over all pairs, both directions.

    The bound is (1/2) (sum over |beta| = 2 of H_a[d^beta f]) |y-x|^(2+a);
    a return value <= 1 means the remainder inequality held everywhere.
    Pairs where both sides vanish (quadratic fields) contribute 0.
    Requires the analytic derivative oracle so the check certifies the
    inequality and not the stencils.
    """
    alpha = _check_alpha(alpha)
    if field.analytic_derivs is None:
        raise ValueError("taylor_remainder_ratio needs analytic_derivs")
    grid = field.grid
    n = grid.n
    i, j = pairs.first, pairs.second
    dx = grid.nodes[i] - grid.nodes[j]

    f = field.values
    grads = [derivative_values(field, beta) for beta in multi_indices(n, 1)]
    hess_beta = multi_indices(n, 2)
    hess = {beta: derivative_values(field, beta) for beta in hess_beta}

    semi_sum = 0.0
    for beta in hess_beta:
        _, semi, _ = weighted_norm_values(hess[beta], alpha, pairs)
        semi_sum += semi
    rhs = 0.5 * semi_sum * pairs.dist ** (2.0 + alpha)

    scale = max(1.0, float(np.abs(f).max()))
    worst = 0.0
    for a, b, step in ((i, j, dx), (j, i, -dx)):
        taylor = f[b].copy()
        for d in range(n):
            taylor += grads[d][b] * step[:, d]
        for beta in hess_beta:
            d1 = beta.index(max(beta))
            if max(beta) == 2:
                taylor += 0.5 * hess[beta][b] * step[:, d1] ** 2
            else:
                d1, d2 = [k for k, v in enumerate(beta) if v == 1]
                taylor += hess[beta][b] * step[:, d1] * step[:, d2]
        lhs = np.abs(f[a] - taylor)
        live = lhs > _EPS * scale
        if not np.any(live):
            continue
        with np.errstate(divide="ignore"):
            ratios = np.where(rhs[live] > 0.0, lhs[live] / rhs[live], np.inf)
        worst = max(worst, float(ratios.max()))
    return worst


def check_taylor_remainder(field: ScalarField, alpha: float,
                           pairs: PairSet) -> bool:
    """Second-order Taylor remainder bound, checked on every pair.

    |f(y) - T2[f, x](y)| <= (1/2) (sum over |beta| = 2 of H_a[d^beta f])
                            * |y - x|^(2 + alpha)

    evaluated in both directions via :func:`taylor_remainder_ratio`.
    """
    return taylor_remainder_ratio(field, alpha, pairs) <= 1.0 + 1e-9


def check_norm_comparison(field: ScalarField, alpha: float,
                          pairs: PairSet) -> bool:
    """Lower-order jet norms controlled by the order-2 norm.

    For fields whose value and gradient vanish at the origin,

        ||f||_a       <= (3 n R)^2 * ||f||-order-2
        ||f||-order-1 <= (3 n R)   * ||f||-order-2.

    Raises if the zero-jet condition fails (checked with analytic
    derivatives at the origin node).
    """
    alpha = _check_alpha(alpha)
    if field.analytic_derivs is None:
        raise ValueError("check_norm_comparison needs analytic_derivs")
    grid = field.grid
    origin = grid.nodes[grid.origin_index:grid.origin_index + 1]
    scale = max(1.0, float(np.abs(field.values).max()))
    v0 = float(field.analytic_derivs(tuple(0 for _ in range(grid.n)), origin)[0])
    if abs(v0) > 1e-10 * scale:
        raise ValueError(f"field value at origin is {v0}, not 0")
    for beta in multi_indices(grid.n, 1):
        g0 = float(field.analytic_derivs(beta, origin)[0])
        if abs(g0) > 1e-10 * scale:
            raise ValueError(f"field gradient at origin is nonzero: {g0}")
    report = jet_norm(field, alpha, pairs)
    base = 3.0 * grid.n * grid.R
    slack = 1.0 + _EPS
    top = report.orders[2]
    return (report.orders[0] <= base**2 * top * slack + _EPS
            and report.orders[1] <= base * top * slack + _EPS)
