"""Upper bounds for a Riemannian analogue of the Kobayashi metric.

The quantity of interest at a chart point p with tangent vector X is the
infimum of 1/R over disks D_R admitting a harmonic map that is conformal
at the origin with u(0) = p and u_x(0) = X.  An exhibited map can only
lower the infimum, so every number this module returns is an upper bound:
the search solves the harmonic-map system on an ascending radius schedule
with the jet [X | Y], Y the metric-orthogonal partner of X, and keeps the
largest radius that produced an in-chart solution.

Two exact short-circuits exist: X = 0 gives 0 by definition, and a flat
target admits the linear map p + x X + y Y on every disk, driving the
bound to 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .picard import (OracleFailure, SolveConfig, SolveFailure, SolveReport,
                     solve_system)
from .reduce import JetSpec
from .systems import TargetManifold, harmonic_map_system


@dataclass(frozen=True)
class KobayashiQuery:
    """One estimation request: where, which vector, how hard to search."""

    target: TargetManifold
    p: np.ndarray
    X: np.ndarray
    r_start: float = 0.25
    growth: float = 1.5
    max_steps: int = 8
    conformality_tol: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "p", np.asarray(self.p, dtype=np.float64))
        object.__setattr__(self, "X", np.asarray(self.X, dtype=np.float64))
        m = self.target.dimension
        if self.p.shape != (m,) or self.X.shape != (m,):
            raise ValueError(f"p and X must be vectors of length {m}")
        if not np.all(np.isfinite(self.p)) or not np.all(np.isfinite(self.X)):
            raise ValueError("p and X must be finite")
        if self.target.chart_radius is not None:
            if np.linalg.norm(self.p) >= self.target.chart_radius:
                raise ValueError(
                    f"chart point |p| = {np.linalg.norm(self.p)} outside "
                    f"chart radius {self.target.chart_radius}"
                )
        if self.r_start <= 0 or self.growth <= 1 or self.max_steps < 1:
            raise ValueError("schedule requires r_start > 0, growth > 1, "
                             "max_steps >= 1")

    def schedule(self) -> list[float]:
        return [self.r_start * self.growth**k for k in range(self.max_steps)]


@dataclass
class RadiusOutcome:
    """Result of one disk-radius probe."""

    R: float
    success: bool
    reason: str
    residual: float | None = None
    conformality_defect: float | None = None
    iterations: int | None = None


@dataclass
class KobayashiEstimate:
    """Search result.  upper_bound is 1/R_best, never a claimed exact value."""

    upper_bound: float | None
    r_best: float | None
    outcomes: list[RadiusOutcome] = field(default_factory=list)
    certificate: str | None = None
    inconclusive: bool = False
    partner: np.ndarray | None = None


def orthogonal_partner(target: TargetManifold, p: np.ndarray,
                       X: np.ndarray) -> np.ndarray:
    """Vector Y with h(Y, Y) = h(X, X) and h(X, Y) = 0 at p.

    Built by Gram-Schmidt in the target metric, starting from the
    coordinate direction least aligned with X.  Requires a genuinely
    two-dimensional tangent space and a nonzero X.
    """
    p = np.asarray(p, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    m = target.dimension
    if m < 2:
        raise ValueError("no orthogonal partner exists in a 1-dimensional "
                         "tangent space")
    hx = float(np.linalg.norm(X))
    if hx == 0.0:
        raise ValueError("X = 0 has no orthogonal partner")
    h = np.asarray(target.metric(p), dtype=np.float64)
    xx = float(X @ h @ X)
    if xx <= 0:
        raise ValueError("metric is not positive on X")
    # seed with the coordinate axis least aligned with X (in the metric)
    alignments = [abs(float(_unit(m, i) @ h @ X)) for i in range(m)]
    seed = _unit(m, int(np.argmin(alignments)))
    y = seed - (float(seed @ h @ X) / xx) * X
    yy = float(y @ h @ y)
    if yy <= 1e-24 * xx:
        raise ValueError("failed to build an independent partner direction")
    return y * np.sqrt(xx / yy)


def conformality_defect(target: TargetManifold, p: np.ndarray,
                        jet_matrix: np.ndarray) -> float:
    """|h(u_x,u_x) - h(u_y,u_y)| + |h(u_x,u_y)| for a 2-column jet."""
    c1 = np.asarray(jet_matrix, dtype=np.float64)
    if c1.ndim != 2 or c1.shape[1] != 2:
        raise ValueError("jet matrix must have two columns (d/dx, d/dy)")
    h = np.asarray(target.metric(np.asarray(p, dtype=np.float64)))
    ux, uy = c1[:, 0], c1[:, 1]
    return abs(float(ux @ h @ ux) - float(uy @ h @ uy)) + abs(float(ux @ h @ uy))


def is_conformal_jet(target: TargetManifold, p: np.ndarray,
                     jet_matrix: np.ndarray, tol: float = 1e-8) -> bool:
    """Relative conformality test of a prescribed (u_x, u_y) pair."""
    c1 = np.asarray(jet_matrix, dtype=np.float64)
    h = np.asarray(target.metric(np.asarray(p, dtype=np.float64)))
    scale = float(c1[:, 0] @ h @ c1[:, 0])
    if scale == 0.0:
        return bool(conformality_defect(target, p, c1) == 0.0)
    return bool(conformality_defect(target, p, c1) <= tol * scale)


def _target_is_flat(target: TargetManifold, samples: int = 32) -> bool:
    """Certify a vanishing connection by deterministic chart sampling."""
    if target.flat:
        return True
    rng = np.random.default_rng(0)
    cap = target.chart_radius if target.chart_radius is not None else 2.0
    for _ in range(samples):
        u = rng.uniform(-0.5, 0.5, size=target.dimension) * cap
        if np.abs(np.asarray(target.christoffel(u))).max() > 1e-14:
            return False
    return True


def estimate(query: KobayashiQuery,
             solve_config: SolveConfig | None = None) -> KobayashiEstimate:
    """Search the radius schedule and return 1/R_best as the upper bound.

    Per-probe solves run with the radius floor pinned at the probe radius,
    so any adaptive shrinking counts as failure at that radius rather than
    a silent success at a smaller one.  The schedule ascends and stops at
    the first failure; if even the smallest radius fails, the estimate is
    flagged inconclusive rather than reported as infinite.
    """
    if float(np.linalg.norm(query.X)) == 0.0:
        return KobayashiEstimate(upper_bound=0.0, r_best=None,
                                 certificate="zero_vector")
    if _target_is_flat(query.target) and query.target.chart_radius is None:
        # the linear map p + x X + y Y is harmonic and conformal at 0 on
        # every disk, so the infimum over the schedule is 0
        partner = orthogonal_partner(query.target, query.p, query.X)
        return KobayashiEstimate(upper_bound=0.0, r_best=None,
                                 certificate="linear_map", partner=partner)

    partner = orthogonal_partner(query.target, query.p, query.X)
    jet = JetSpec(query.p, np.column_stack([query.X, partner]))
    defect = conformality_defect(query.target, query.p, jet.c1)
    scale = float(query.X @ np.asarray(query.target.metric(query.p)) @ query.X)
    if defect > query.conformality_tol * scale:
        raise ValueError(
            f"constructed jet is not conformal (defect {defect}); "
            "orthogonal partner construction failed"
        )

    base = solve_config or SolveConfig(res=21, tol=1e-7)
    outcomes: list[RadiusOutcome] = []
    r_best = None
    for radius in query.schedule():
        cfg = SolveConfig(
            R0=radius, R_min=radius * 0.99, res=base.res, alpha=base.alpha,
            tol=base.tol, max_iter=base.max_iter, gamma0=base.gamma0,
            gamma0_floor=base.gamma0_floor,
            contraction_threshold=base.contraction_threshold,
            max_gamma_doublings=base.max_gamma_doublings,
            c_samples=base.c_samples, pair_cap=base.pair_cap,
            seed=base.seed, harmonic_seed=None, threads=base.threads,
        )
        system = harmonic_map_system(2, query.target)
        try:
            report: SolveReport = solve_system(system, jet, cfg,
                                               ellipticity_samples=0)
        except (SolveFailure, OracleFailure) as exc:
            outcomes.append(RadiusOutcome(
                R=radius, success=False, reason=type(exc).__name__))
            break
        if not report.in_chart:
            outcomes.append(RadiusOutcome(
                R=radius, success=False, reason="left_chart",
                residual=report.residual, iterations=report.iterations))
            break
        outcomes.append(RadiusOutcome(
            R=radius, success=True, reason="converged",
            residual=report.residual, conformality_defect=defect,
            iterations=report.iterations))
        r_best = radius

    if r_best is None:
        return KobayashiEstimate(upper_bound=None, r_best=None,
                                 outcomes=outcomes, inconclusive=True,
                                 partner=partner)
    return KobayashiEstimate(upper_bound=1.0 / r_best, r_best=r_best,
                             outcomes=outcomes, partner=partner)


def _unit(dim: int, i: int) -> np.ndarray:
    e = np.zeros(dim)
    e[i] = 1.0
    return e
