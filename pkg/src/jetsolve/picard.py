"""Fixed-point solver for zero-jet Poisson-form systems.

The iteration lives on a closed ball of fields: starting from zero,
each sweep evaluates the source term of the current iterate, applies the
Newtonian potential, adds the harmonic seed, and subtracts the origin jet
(value, gradient, and off-diagonal second-order terms — a harmonic
polynomial, so the subtraction never perturbs the Laplacian).  The ball
radius in norm (gamma) doubles when an iterate escapes; the domain radius
halves when doubling is exhausted or the increments stop contracting.

Derivatives of iterates are taken by finite differences throughout; the
origin jet subtracted by the sweep uses the same stencils, which is what
makes the zero-jet property of each iterate exact rather than merely
O(h^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .grid import (BallGrid, PairSet, ScalarField, VectorField, build_grid,
                   build_pair_set, fd_values)
from .holder import jet_norm
from .potential import _apply_potential, check_potential_norm_bound
from .probes import potential_probes
from .reduce import (JetSpec, PoissonSystem, SystemDef, check_ellipticity,
                     diagonalize, shift_jet)


class SolveFailure(RuntimeError):
    """Base class for solver give-ups; carries the partial report."""

    def __init__(self, message: str, report: "SolveReport | None" = None):
        super().__init__(message)
        self.report = report


class NoConvergence(SolveFailure):
    """Radius floor reached without a contracting run."""


class IterateEscaped(SolveFailure):
    """Iterates kept leaving the norm ball even after enlarging it."""


class OracleFailure(RuntimeError):
    """A coefficient or source oracle misbehaved at a specific node."""

    def __init__(self, message: str, node: np.ndarray | None = None):
        if node is not None:
            message = f"{message} at node {np.asarray(node).tolist()}"
        super().__init__(message)
        self.node = None if node is None else np.asarray(node, dtype=float)


# ---------------------------------------------------------------------------
# harmonic seed polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HarmonicPolynomial:
    """Polynomial of degree <= 3 whose Laplacian cancels identically.

    terms maps exponent tuples to coefficients; harmonicity is verified
    symbolically on the monomial coefficients at construction, so a
    non-harmonic seed is rejected before it can contaminate a solve.
    """

    terms: tuple[tuple[tuple[int, ...], float], ...]

    def __init__(self, terms: dict[tuple[int, ...], float] | Sequence):
        if isinstance(terms, dict):
            items = terms.items()
        else:
            items = [(tuple(int(v) for v in e), float(c)) for e, c in terms]
        canon: dict[tuple[int, ...], float] = {}
        dim = None
        for expo, coeff in items:
            expo = tuple(int(v) for v in expo)
            if any(v < 0 for v in expo):
                raise ValueError(f"negative exponent in {expo}")
            if dim is None:
                dim = len(expo)
            elif len(expo) != dim:
                raise ValueError("inconsistent exponent lengths")
            if sum(expo) > 3:
                raise ValueError(
                    f"seed degree {sum(expo)} exceeds 3 (term {expo})"
                )
            canon[expo] = canon.get(expo, 0.0) + float(coeff)
        if dim is None:
            raise ValueError("empty polynomial; use HarmonicPolynomial.zero(n)")
        lap: dict[tuple[int, ...], float] = {}
        scale = max((abs(c) for c in canon.values()), default=0.0)
        for expo, coeff in canon.items():
            for i, e in enumerate(expo):
                if e >= 2:
                    key = tuple(v - 2 if j == i else v
                                for j, v in enumerate(expo))
                    lap[key] = lap.get(key, 0.0) + coeff * e * (e - 1)
        bad = {k: v for k, v in lap.items() if abs(v) > 1e-10 * (1.0 + scale)}
        if bad:
            raise ValueError(f"polynomial is not harmonic; Laplacian terms {bad}")
        object.__setattr__(
            self, "terms", tuple(sorted(canon.items()))
        )

    @property
    def dimension(self) -> int:
        return len(self.terms[0][0])

    @staticmethod
    def zero(n: int) -> "HarmonicPolynomial":
        return HarmonicPolynomial({(0,) * n: 0.0})

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        out = np.zeros(pts.shape[0])
        for expo, coeff in self.terms:
            if coeff == 0.0:
                continue
            term = np.full(pts.shape[0], coeff)
            for i, e in enumerate(expo):
                if e:
                    term *= pts[:, i] ** e
            out += term
        return out

    def to_jsonable(self) -> list:
        return [[list(e), c] for e, c in self.terms]


def seed_field_values(seed, grid: BallGrid, m: int) -> np.ndarray:
    """Evaluate the per-component harmonic seed on the grid -> (N, m)."""
    out = np.zeros((grid.node_count, m))
    if seed is None:
        return out
    if isinstance(seed, HarmonicPolynomial):
        seed = [seed]
    seed = list(seed)
    if len(seed) != m:
        raise ValueError(f"need {m} seed polynomials, got {len(seed)}")
    for k, poly in enumerate(seed):
        if poly is None:
            continue
        if poly.dimension != grid.n:
            raise ValueError(
                f"seed component {k} has dimension {poly.dimension}, "
                f"grid has {grid.n}"
            )
        out[:, k] = poly.evaluate(grid.nodes)
    return out


# ---------------------------------------------------------------------------
# configuration and state
# ---------------------------------------------------------------------------

@dataclass
class SolveConfig:
    """Knobs for one solve.  Field names mirror the CLI/config schema."""

    R0: float = 1.0
    R_min: float | None = None          # default R0 / 64
    res: int = 33
    alpha: float = 0.5
    tol: float = 1e-7
    max_iter: int = 40
    gamma0: float | None = None         # None -> derived from the source rule
    gamma0_floor: float = 0.5
    contraction_threshold: float = 0.9
    max_gamma_doublings: int = 6
    c_samples: int = 512
    pair_cap: int = 200_000
    seed: int = 0
    harmonic_seed: Sequence[HarmonicPolynomial] | HarmonicPolynomial | None = None
    threads: int | None = None          # advisory; recorded in reports

    def __post_init__(self):
        if self.R0 <= 0:
            raise ValueError("R0 must be positive")
        if self.R_min is not None and not 0 < self.R_min < self.R0 * (1 + 1e-12):
            raise ValueError("R_min must lie in (0, R0]")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.res < 5 or self.res % 2 == 0:
            raise ValueError("res must be odd and at least 5")
        if self.gamma0 is not None and self.gamma0 <= 0:
            raise ValueError("gamma0 must be positive")
        if self.gamma0_floor <= 0:
            raise ValueError("gamma0_floor must be positive")
        if not 0 < self.contraction_threshold < 1:
            raise ValueError("contraction_threshold must lie in (0, 1)")
        if self.max_gamma_doublings < 0:
            raise ValueError("max_gamma_doublings must be >= 0")
        if self.c_samples < 1:
            raise ValueError("c_samples must be positive")

    @property
    def radius_floor(self) -> float:
        return self.R_min if self.R_min is not None else self.R0 / 64.0


@dataclass(eq=False)
class IterateState:
    """One iterate with its finite-difference derivative tables."""

    grid: BallGrid
    values: np.ndarray            # (N, m)
    grad: np.ndarray              # (N, m, n)
    hess: np.ndarray              # (N, m, n, n), symmetric in the last axes
    index: int = 0
    norm: float | None = None

    @property
    def m(self) -> int:
        return self.values.shape[1]


def make_state(grid: BallGrid, values: np.ndarray,
               index: int = 0) -> IterateState:
    """Fill the derivative tables of an iterate by finite differences."""
    vals = np.asarray(values, dtype=np.float64)
    if vals.ndim == 1:
        vals = vals[:, None]
    n, m, big_n = grid.n, vals.shape[1], grid.node_count
    grad = np.empty((big_n, m, n))
    hess = np.empty((big_n, m, n, n))
    for k in range(m):
        col = vals[:, k]
        for d in range(n):
            e = tuple(1 if i == d else 0 for i in range(n))
            grad[:, k, d] = fd_values(grid, col, e)
        for i in range(n):
            for j in range(i, n):
                e = tuple((2 if a == i else 0) if i == j
                          else (1 if a in (i, j) else 0) for a in range(n))
                d2 = fd_values(grid, col, e)
                hess[:, k, i, j] = d2
                hess[:, k, j, i] = d2
    return IterateState(grid=grid, values=vals, grad=grad, hess=hess,
                        index=index)


# ---------------------------------------------------------------------------
# the sweep: source term, potential, jet subtraction
# ---------------------------------------------------------------------------

def source_term(system: PoissonSystem, state: IterateState) -> np.ndarray:
    """Right side fed to the potential:  -psi - sum_ij b^ij d_ij f^k.

    Evaluated nodewise from the iterate's finite-difference tables; any
    oracle exception or non-finite return is reported with the offending
    node's coordinates.
    """
    grid = state.grid
    big_n, m = grid.node_count, state.m
    out = np.empty((big_n, m))
    for idx in range(big_n):
        x = grid.nodes[idx]
        p = state.values[idx]
        q = state.grad[idx]
        try:
            psi_val = np.asarray(system.psi(x, p, q), dtype=np.float64)
            b_val = np.asarray(system.b(x, p, q), dtype=np.float64)
        except Exception as exc:  # noqa: BLE001 - wrap with location
            raise OracleFailure(f"coefficient oracle raised {exc!r}",
                                node=x) from exc
        if psi_val.shape != (m,) or b_val.shape != (grid.n, grid.n):
            raise OracleFailure(
                f"oracle shape mismatch (psi {psi_val.shape}, b {b_val.shape})",
                node=x,
            )
        row = -psi_val - np.einsum("ij,kij->k", b_val, state.hess[idx])
        if not np.all(np.isfinite(row)):
            raise OracleFailure("oracle produced non-finite values", node=x)
        out[idx] = row
    return out


def potential_map(system: PoissonSystem, state: IterateState,
                  want_derivatives: bool = True) -> dict:
    """Newtonian potential of the source term, with its kernel jet.

    Returns a dict with 'source' (N, m), 'values' (N, m) and, when
    want_derivatives, 'gradients' (N, m, n) and 'hessians' (N, m, n, n)
    computed by the singular-kernel formulas (not finite differences), so
    the two derivative routes can be compared.
    """
    grid = state.grid
    src = source_term(system, state)
    res = _apply_potential(grid, src, want_value=True,
                           want_grad=want_derivatives,
                           want_hess=want_derivatives)
    out = {"source": src, "values": res["value"]}
    if want_derivatives:
        out["gradients"] = res["grad"].transpose(0, 2, 1)      # -> (N, m, n)
        out["hessians"] = res["hess"].transpose(0, 3, 1, 2)    # -> (N, m, n, n)
    return out


def _origin_jet_polynomial(grid: BallGrid, col: np.ndarray) -> np.ndarray:
    """Evaluate the subtracted jet polynomial of one component on the grid.

    The polynomial collects the origin-node value, the central-difference
    gradient, and the off-diagonal second-order terms; its diagonal
    second-order part is empty, so its (discrete and continuous) Laplacian
    vanishes and the subtraction leaves the field's Laplacian untouched.
    """
    n = grid.n
    o = grid.origin_index
    value = col[o]
    poly = np.full(grid.node_count, value)
    for d in range(n):
        e = tuple(1 if i == d else 0 for i in range(n))
        g = fd_values(grid, col, e)[o]
        poly += g * grid.nodes[:, d]
    for i in range(n):
        for j in range(i + 1, n):
            e = tuple(1 if a in (i, j) else 0 for a in range(n))
            mij = fd_values(grid, col, e)[o]
            poly += mij * grid.nodes[:, i] * grid.nodes[:, j]
    return poly


def picard_map(system: PoissonSystem, state: IterateState,
               seed_values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One sweep: potential of the source, seed added, origin jet removed.

    Returns (new_values, source_values).  The subtracted jet uses the same
    finite-difference stencils as every later jet check, which pins the
    origin value and gradient of the result at exactly zero.
    """
    grid = state.grid
    src = source_term(system, state)
    omega = _apply_potential(grid, src, want_value=True)["value"]
    cand = omega + seed_values
    new = np.empty_like(cand)
    for k in range(state.m):
        new[:, k] = cand[:, k] - _origin_jet_polynomial(grid, cand[:, k])
    return new, src


# ---------------------------------------------------------------------------
# norms, gamma rule, deviation estimate, residual
# ---------------------------------------------------------------------------

def solver_norm(grid: BallGrid, values: np.ndarray, alpha: float,
                pairs: PairSet) -> float:
    """Discrete second-order weighted Holder norm of an (N, m) field."""
    vals = np.asarray(values, dtype=np.float64)
    if vals.ndim == 1:
        vals = vals[:, None]
    fields = [ScalarField(grid, vals[:, k]) for k in range(vals.shape[1])]
    vf = VectorField(tuple(fields))
    return jet_norm(vf, alpha, pairs).solver_norm


def choose_norm_radius(system: PoissonSystem, config: SolveConfig,
                       ) -> tuple[float, float | None, float]:
    """Initial norm-ball radius gamma0 from the source size at the origin.

    gamma0 = max(4 * C_hat * max_i |psi^i(0,0,0)|, floor), with C_hat the
    measured potential norm-amplification ratio on a coarse probe grid at
    the solve radius.  An explicit config.gamma0 short-circuits the rule.
    Returns (gamma0, C_hat or None, |psi(0)|).
    """
    z_x = np.zeros(system.n)
    z_p = np.zeros(system.m)
    z_q = np.zeros((system.m, system.n))
    psi0 = float(np.max(np.abs(np.asarray(system.psi(z_x, z_p, z_q)))))
    if config.gamma0 is not None:
        return float(config.gamma0), None, psi0
    probe_res = min(config.res, 17 if system.n == 3 else 21)
    if probe_res % 2 == 0:
        probe_res -= 1
    probe_grid = build_grid(system.n, config.R0, max(probe_res, 5))
    report = check_potential_norm_bound(
        potential_probes(system.n), probe_grid, config.alpha,
    )
    c_hat = report.max_ratio
    gamma0 = max(4.0 * c_hat * psi0, config.gamma0_floor)
    return gamma0, c_hat, psi0


def coefficient_deviation_sup(system: PoissonSystem, radius: float,
                              gamma: float, samples: int = 512,
                              seed: int = 0) -> float:
    """Largest |b^kl| over the box |x| <= R, |p| <= R^2 g, |q| <= R g.

    Unit-ball draws are fixed by the seed and rescaled per box, and the
    box corners are always included, so shrinking the box can never raise
    the estimate for coefficient families that grow along rays.
    """
    n, m = system.n, system.m
    rng = np.random.default_rng(seed)
    p_cap = radius * radius * gamma
    q_cap = radius * gamma

    def unit_ball(dim: int, count: int) -> np.ndarray:
        v = rng.standard_normal((count, dim))
        norms = np.linalg.norm(v, axis=1, keepdims=True)
        norms[norms < 1e-12] = 1.0
        radii = rng.uniform(size=(count, 1)) ** (1.0 / dim)
        return v / norms * radii

    xs = [unit_ball(n, samples) * radius]
    ps = [unit_ball(m, samples) * p_cap]
    qs = [unit_ball(m * n, samples).reshape(samples, m, n) * q_cap]
    # box corners, paired with the origin in the other slots
    corner_x = [np.zeros(n)] + [s * radius * _unit(n, i)
                                for i in range(n) for s in (-1.0, 1.0)]
    corner_p = [np.zeros(m)] + [s * p_cap * _unit(m, i)
                                for i in range(m) for s in (-1.0, 1.0)]
    corner_q = [np.zeros((m, n))]
    for k in range(m):
        for l in range(n):
            e = np.zeros((m, n))
            e[k, l] = q_cap
            corner_q.extend([e, -e])
    corner_q.append(np.full((m, n), q_cap / math.sqrt(m * n)))

    worst = 0.0
    for x, p, q in zip(xs[0], ps[0], qs[0]):
        worst = max(worst, float(np.abs(np.asarray(system.b(x, p, q))).max()))
    for x in corner_x:
        for p in corner_p:
            for q in corner_q:
                worst = max(
                    worst, float(np.abs(np.asarray(system.b(x, p, q))).max())
                )
    return worst


def _unit(dim: int, i: int) -> np.ndarray:
    e = np.zeros(dim)
    e[i] = 1.0
    return e


@dataclass(frozen=True)
class ResidualReport:
    """Interior defect of a candidate solution, by finite differences."""

    residual_sup: float           # sup over interior nodes of |lap u + source|
    source_sup: float             # sup over all nodes of |source|
    node_residuals: np.ndarray    # (N,) max over components, nan off-interior


def residual_check(system: PoissonSystem, grid: BallGrid,
                   values: np.ndarray) -> ResidualReport:
    """Check lap(u) = -source with stencils independent of the quadrature."""
    state = make_state(grid, values)
    src = source_term(system, state)
    lap = np.einsum("kmii->km", state.hess)
    defect = np.abs(lap + src).max(axis=1)
    node_res = np.where(grid.interior_mask, defect, np.nan)
    interior = defect[grid.interior_mask]
    sup = float(interior.max()) if interior.size else float("nan")
    return ResidualReport(residual_sup=sup,
                          source_sup=float(np.abs(src).max()),
                          node_residuals=node_res)


def origin_jet_magnitudes(grid: BallGrid,
                          values: np.ndarray) -> tuple[float, float]:
    """(|f(0)|, |Df(0)|) at the origin node, max over components."""
    vals = np.asarray(values, dtype=np.float64)
    if vals.ndim == 1:
        vals = vals[:, None]
    o = grid.origin_index
    value_mag = float(np.abs(vals[o]).max())
    grad_mag = 0.0
    for k in range(vals.shape[1]):
        for d in range(grid.n):
            e = tuple(1 if i == d else 0 for i in range(grid.n))
            grad_mag = max(grad_mag, abs(float(fd_values(grid, vals[:, k], e)[o])))
    return value_mag, grad_mag


# ---------------------------------------------------------------------------
# the driver
# ---------------------------------------------------------------------------

@dataclass
class AttemptRecord:
    """One (radius, gamma) attempt of the iteration."""

    R: float
    gamma_start: float
    gamma_end: float
    iterations: int
    outcome: str                   # converged | escaped | no_contraction | max_iter
    increment_norms: list[float]
    ratios: list[float]
    deviation_sup: float | None = None
    escape_norm: float | None = None


@dataclass
class SolveReport:
    """Everything a run learned, whether or not it converged."""

    status: str
    grid: BallGrid | None
    solution: VectorField | None
    final_R: float
    gamma: float
    gamma0: float
    c_hat: float | None
    psi_origin: float
    iterations: int
    increment_norms: list[float]
    ratios: list[float]
    ratio_geomean: float | None
    residual: float | None
    source_sup: float | None
    node_residuals: np.ndarray | None
    jet_value: float | None
    jet_gradient: float | None
    solution_norm: float | None
    attempts: list[AttemptRecord]
    deviation_history: list[float]
    config: SolveConfig
    pair_count: int | None = None
    # filled by solve_system when a jet/coordinate reduction is involved
    original_coords: np.ndarray | None = None
    reconstructed: np.ndarray | None = None
    in_chart: bool | None = None
    transform: np.ndarray | None = None

    def summary(self) -> dict:
        """JSON-safe digest (no whole-field arrays)."""
        out = {
            "status": self.status,
            "final_R": self.final_R,
            "gamma": self.gamma,
            "gamma0": self.gamma0,
            "c_hat": self.c_hat,
            "psi_origin": self.psi_origin,
            "iterations": self.iterations,
            "increment_norms": self.increment_norms,
            "contraction_ratios": self.ratios,
            "contraction_geomean": self.ratio_geomean,
            "residual_sup": self.residual,
            "source_sup": self.source_sup,
            "jet_value": self.jet_value,
            "jet_gradient": self.jet_gradient,
            "solution_norm": self.solution_norm,
            "deviation_history": self.deviation_history,
            "attempts": [
                {
                    "R": a.R,
                    "gamma_start": a.gamma_start,
                    "gamma_end": a.gamma_end,
                    "iterations": a.iterations,
                    "outcome": a.outcome,
                    "increment_norms": a.increment_norms,
                    "ratios": a.ratios,
                    "deviation_sup": a.deviation_sup,
                }
                for a in self.attempts
            ],
            "pair_count": self.pair_count,
            "in_chart": self.in_chart,
        }
        return out


def _run_attempt(system: PoissonSystem, grid: BallGrid, pairs: PairSet,
                 seed_vals: np.ndarray, gamma: float,
                 config: SolveConfig) -> tuple[str, np.ndarray, AttemptRecord]:
    """Iterate at fixed (R, gamma) until convergence or a failure signal."""
    big_n, m = grid.node_count, system.m
    f = np.zeros((big_n, m))
    increments: list[float] = []
    ratios: list[float] = []
    streak = 0
    outcome = "max_iter"
    escape_norm = None
    for it in range(1, config.max_iter + 1):
        state = make_state(grid, f, index=it - 1)
        new, _src = picard_map(system, state, seed_vals)
        inc = solver_norm(grid, new - f, config.alpha, pairs)
        increments.append(inc)
        f = new
        f_norm = solver_norm(grid, f, config.alpha, pairs)
        if f_norm > gamma:
            outcome = "escaped"
            escape_norm = f_norm
            break
        if inc < config.tol:
            outcome = "converged"
            break
        if len(increments) >= 2 and increments[-2] > 0:
            r = increments[-1] / increments[-2]
            ratios.append(r)
            streak = streak + 1 if r > config.contraction_threshold else 0
            if streak >= 3:
                outcome = "no_contraction"
                break
    record = AttemptRecord(
        R=grid.R, gamma_start=gamma, gamma_end=gamma,
        iterations=len(increments), outcome=outcome,
        increment_norms=increments, ratios=ratios, escape_norm=escape_norm,
    )
    return outcome, f, record


def picard_solve(system: PoissonSystem, config: SolveConfig) -> SolveReport:
    """Run the adaptive fixed-point iteration.

    Policy: escape of the norm ball doubles gamma (bounded by
    max_gamma_doublings, shared across radii); non-contraction, iteration
    exhaustion, or an exhausted doubling budget halves the radius and
    restarts from zero on a fresh grid; gamma is carried across halvings.
    Raises NoConvergence/IterateEscaped at the radius floor, with the
    partial report attached to the exception.
    """
    radius = config.R0
    floor = config.radius_floor
    gamma, c_hat, psi0 = choose_norm_radius(system, config)
    gamma0 = gamma
    doublings = 0
    attempts: list[AttemptRecord] = []
    deviation_history: list[float] = []
    last_outcome = "never_ran"

    while True:
        grid = build_grid(system.n, radius, config.res)
        pairs = build_pair_set(grid, seed=config.seed, cap=config.pair_cap)
        seed_vals = seed_field_values(config.harmonic_seed, grid, system.m)

        while True:
            outcome, f, record = _run_attempt(
                system, grid, pairs, seed_vals, gamma, config)
            record.deviation_sup = coefficient_deviation_sup(
                system, radius, gamma, samples=config.c_samples,
                seed=config.seed)
            attempts.append(record)
            deviation_history.append(record.deviation_sup)
            last_outcome = outcome

            if outcome == "converged":
                return _final_report(system, grid, pairs, f, config,
                                     gamma, gamma0, c_hat, psi0,
                                     attempts, deviation_history)
            if outcome == "escaped" and doublings < config.max_gamma_doublings:
                doublings += 1
                gamma *= 2.0
                record.gamma_end = gamma
                continue
            break  # halve the radius

        radius *= 0.5
        if radius < floor * (1.0 - 1e-12):
            report = _partial_report(system, config, radius * 2.0, gamma,
                                     gamma0, c_hat, psi0, attempts,
                                     deviation_history, last_outcome)
            if last_outcome == "escaped":
                raise IterateEscaped(
                    f"norm ball exceeded after {doublings} doublings down to "
                    f"radius {radius * 2.0:g} (floor {floor:g})",
                    report=report,
                )
            raise NoConvergence(
                f"no contracting run above the radius floor {floor:g} "
                f"(last outcome: {last_outcome})",
                report=report,
            )


def _final_report(system, grid, pairs, f, config, gamma, gamma0, c_hat,
                  psi0, attempts, deviation_history) -> SolveReport:
    res = residual_check(system, grid, f)
    jet_value, jet_gradient = origin_jet_magnitudes(grid, f)
    final = attempts[-1]
    ratios = final.ratios
    geo = (float(np.exp(np.mean(np.log(ratios))))
           if ratios and all(r > 0 for r in ratios) else None)
    fields = tuple(ScalarField(grid, f[:, k].copy()) for k in range(system.m))
    return SolveReport(
        status="converged",
        grid=grid,
        solution=VectorField(fields),
        final_R=grid.R,
        gamma=gamma,
        gamma0=gamma0,
        c_hat=c_hat,
        psi_origin=psi0,
        iterations=final.iterations,
        increment_norms=final.increment_norms,
        ratios=ratios,
        ratio_geomean=geo,
        residual=res.residual_sup,
        source_sup=res.source_sup,
        node_residuals=res.node_residuals,
        jet_value=jet_value,
        jet_gradient=jet_gradient,
        solution_norm=solver_norm(grid, f, config.alpha, pairs),
        attempts=attempts,
        deviation_history=deviation_history,
        config=config,
        pair_count=pairs.first.shape[0],
    )


def _partial_report(system, config, last_R, gamma, gamma0, c_hat, psi0,
                    attempts, deviation_history, outcome) -> SolveReport:
    return SolveReport(
        status=f"failed:{outcome}",
        grid=None, solution=None,
        final_R=last_R, gamma=gamma, gamma0=gamma0, c_hat=c_hat,
        psi_origin=psi0,
        iterations=attempts[-1].iterations if attempts else 0,
        increment_norms=attempts[-1].increment_norms if attempts else [],
        ratios=attempts[-1].ratios if attempts else [],
        ratio_geomean=None,
        residual=None, source_sup=None, node_residuals=None,
        jet_value=None, jet_gradient=None, solution_norm=None,
        attempts=attempts, deviation_history=deviation_history,
        config=config,
    )


# ---------------------------------------------------------------------------
# full pipeline: jet shift, diagonalization, solve, reconstruction
# ---------------------------------------------------------------------------

def solve_system(system: SystemDef, jet: JetSpec | None,
                 config: SolveConfig,
                 ellipticity_samples: int = 1000) -> SolveReport:
    """Solve a quasi-linear system with a prescribed 1-jet at the origin.

    The system is sampled for ellipticity, shifted so the unknown has a
    zero jet, diagonalized at the origin, handed to the fixed-point
    iteration, and the solution is mapped back:
    u(x) = c0 + c1 x + v(P x).  The report gains the node coordinates in
    the original frame, the reconstructed values, the coordinate map, and
    an in-chart flag when the system declares a chart radius.
    """
    if jet is None:
        jet = JetSpec.zero(system.m, system.n)
    if (jet.m, jet.n) != (system.m, system.n):
        raise ValueError(
            f"jet shape ({jet.m}, {jet.n}) does not match system "
            f"({system.m}, {system.n})"
        )
    if ellipticity_samples:
        check_ellipticity(system, samples=ellipticity_samples,
                          seed=config.seed)
    shifted = shift_jet(system, jet)
    poisson = diagonalize(shifted, jet)
    report = picard_solve(poisson, config)
    _attach_reconstruction(report, poisson, jet)
    return report


def _attach_reconstruction(report: SolveReport, poisson: PoissonSystem,
                           jet: JetSpec) -> None:
    if report.grid is None or report.solution is None:
        return
    grid = report.grid
    x_orig = grid.nodes @ poisson.P_inv.T
    v_vals = report.solution.values_matrix()
    u_vals = jet.c0[None, :] + x_orig @ jet.c1.T + v_vals
    report.original_coords = x_orig
    report.reconstructed = u_vals
    report.transform = poisson.P
    if poisson.chart_radius is not None:
        sup_u = float(np.linalg.norm(u_vals, axis=1).max())
        report.in_chart = bool(sup_u < poisson.chart_radius)
    else:
        report.in_chart = True
