"""Concrete quasi-linear systems and target geometries.

Each builder returns a :class:`~jetsolve.reduce.SystemDef` wrapping numpy
coefficient oracles.  Registries map names (as used by the command line and
config files) to builders so new systems plug in without touching the solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .reduce import SystemDef


# ---------------------------------------------------------------------------
# target geometries for map systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TargetManifold:
    """A Riemannian target presented in a single chart.

    christoffel(p) returns the (m, m, m) array G[a, b, c] of connection
    coefficients at the chart point p; metric(p) the (m, m) metric matrix.
    chart_radius bounds |p| for admissible points (None = all of R^m);
    flat marks targets whose connection vanishes identically.
    """

    name: str
    dimension: int
    christoffel: Callable[[np.ndarray], np.ndarray]
    metric: Callable[[np.ndarray], np.ndarray]
    chart_radius: float | None = None
    flat: bool = False


def _conformal_target(name: str, m: int, sign: float,
                      chart_radius: float | None) -> TargetManifold:
    """Target with metric lam(u)^2 I, lam = 2 / (1 + sign * |u|^2).

    sign=+1 gives the round sphere in stereographic coordinates, sign=-1
    the hyperbolic disk in the Poincare chart.  For a conformal factor the
    connection is

        G[a, b, c] = d_ab s_c + d_ac s_b - d_bc s_a,   s = grad log lam,

    and grad log lam = -sign * 2 u / (1 + sign * |u|^2).
    """

    def _check_chart(p: np.ndarray) -> None:
        if chart_radius is not None and float(p @ p) >= chart_radius**2:
            raise ValueError(
                f"chart point |u| = {np.linalg.norm(p):.6g} outside the "
                f"{name} chart of radius {chart_radius}"
            )

    def log_lam_grad(p: np.ndarray) -> np.ndarray:
        return -sign * 2.0 * p / (1.0 + sign * float(p @ p))

    def christoffel(p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=np.float64)
        _check_chart(p)
        s = log_lam_grad(p)
        eye = np.eye(m)
        return (np.einsum("ab,c->abc", eye, s)
                + np.einsum("ac,b->abc", eye, s)
                - np.einsum("bc,a->abc", eye, s))

    def metric(p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=np.float64)
        _check_chart(p)
        lam = 2.0 / (1.0 + sign * float(p @ p))
        return lam * lam * np.eye(m)

    return TargetManifold(name=name, dimension=m, christoffel=christoffel,
                          metric=metric, chart_radius=chart_radius, flat=False)


def euclidean_target(m: int) -> TargetManifold:
    """Flat R^m: identity metric, vanishing connection."""
    zero = np.zeros((m, m, m))
    eye = np.eye(m)
    return TargetManifold(
        name="euclidean", dimension=m,
        christoffel=lambda p: zero, metric=lambda p: eye,
        chart_radius=None, flat=True,
    )


def sphere_stereographic_target(m: int = 2) -> TargetManifold:
    """Round m-sphere, stereographic chart (misses one point).

    The chart covers everything except the antipode; we cap |u| at 10 so
    iterates stay well inside the numerically trustworthy region.
    """
    return _conformal_target("sphere", m, sign=+1.0, chart_radius=10.0)


def hyperbolic_disk_target(m: int = 2) -> TargetManifold:
    """Hyperbolic m-space in the Poincare ball chart |u| < 1."""
    return _conformal_target("hyperbolic", m, sign=-1.0, chart_radius=1.0)


# ---------------------------------------------------------------------------
# scalar systems
# ---------------------------------------------------------------------------

def poisson_system(n: int, const: np.ndarray | float = 0.0,
                   linear: np.ndarray | None = None,
                   m: int = 1) -> SystemDef:
    """lap(u) = const + linear . x, identity coefficients.

    The solver-facing coefficient matrix is already the identity, so the
    deviation term vanishes and the fixed-point map converges in at most
    two sweeps (one to integrate the source, one to confirm).
    """
    c = np.broadcast_to(np.asarray(const, dtype=np.float64), (m,)).copy()
    if linear is None:
        lin = np.zeros((m, n))
    else:
        lin = np.asarray(linear, dtype=np.float64).reshape(m, n).copy()
    eye = np.eye(n)

    return SystemDef(
        n=n, m=m,
        a=lambda x, p, q: eye,
        phi=lambda x, p, q: c + lin @ x,
        lam=1.0, name="poisson", smoothness="C^infinity",
        x_bound=2.0, p_bound=2.0, q_bound=2.0,
    )


def _graph_coefficients(q: np.ndarray) -> np.ndarray:
    """I - Du Du^T / (1 + |Du|^2) for a scalar graph with gradient row q."""
    du = np.asarray(q, dtype=np.float64).reshape(-1)
    denom = 1.0 + float(du @ du)
    return np.eye(du.shape[0]) - np.outer(du, du) / denom


def minimal_surface_system(n: int, q_bound: float = 1.0) -> SystemDef:
    """Non-parametric minimal surface equation for a graph over R^n.

    Written with coefficients I - Du Du^T/(1+|Du|^2) and zero right side;
    the smallest coefficient eigenvalue over |Du| <= q_bound is
    1 / (1 + q_bound^2).
    """
    return SystemDef(
        n=n, m=1,
        a=lambda x, p, q: _graph_coefficients(q),
        phi=lambda x, p, q: np.zeros(1),
        lam=1.0 / (1.0 + q_bound**2),
        name="minimal_surface", smoothness="C^infinity",
        x_bound=2.0, p_bound=2.0, q_bound=q_bound,
    )


def prescribed_mean_curvature_system(
    n: int,
    mean_curvature: Callable[[np.ndarray, float], float] | float,
    q_bound: float = 1.0,
) -> SystemDef:
    """Graph with prescribed mean curvature H(x, u).

    Same principal part as the minimal surface; right side
    n H (1 + |Du|^2)^(1/2).  mean_curvature may be a constant or a
    callable (x, u) -> float.
    """
    if callable(mean_curvature):
        h_fn = mean_curvature
    else:
        h_val = float(mean_curvature)
        h_fn = lambda x, u: h_val  # noqa: E731

    def phi(x, p, q):
        du = np.asarray(q, dtype=np.float64).reshape(-1)
        return np.array([n * h_fn(x, float(p[0]))
                         * np.sqrt(1.0 + float(du @ du))])

    return SystemDef(
        n=n, m=1,
        a=lambda x, p, q: _graph_coefficients(q),
        phi=phi,
        lam=1.0 / (1.0 + q_bound**2),
        name="prescribed_mean_curvature", smoothness="C^{1,alpha}",
        x_bound=2.0, p_bound=2.0, q_bound=q_bound,
    )


# ---------------------------------------------------------------------------
# harmonic maps
# ---------------------------------------------------------------------------

def harmonic_map_system(n: int, target: TargetManifold,
                        domain_metric: Callable[[np.ndarray], np.ndarray] | None = None,
                        q_bound: float = 1.0) -> SystemDef:
    """Harmonic map system from a flat domain into a chart of the target.

    With the identity domain metric the equation is

        lap(u^a) = - G^a_bc(u) <Du^b, Du^c>,

    so the coefficient matrix is the identity (deviation-free) and all the
    nonlinearity sits in the right side.  A non-flat domain metric g(x)
    replaces the identity coefficients with g^{-1}(x).
    """
    m = target.dimension

    if domain_metric is None:
        eye = np.eye(n)
        a = lambda x, p, q: eye  # noqa: E731
        lam = 1.0
    else:
        def a(x, p, q):
            return np.linalg.inv(np.asarray(domain_metric(x), dtype=np.float64))
        lam = _metric_inverse_floor(domain_metric, n)

    def phi(x, p, q):
        gamma = target.christoffel(np.asarray(p, dtype=np.float64))
        qm = np.asarray(q, dtype=np.float64)
        if domain_metric is None:
            inner = qm @ qm.T           # <Du^b, Du^c>
        else:
            ginv = np.linalg.inv(np.asarray(domain_metric(x), dtype=np.float64))
            inner = qm @ ginv @ qm.T
        return -np.einsum("abc,bc->a", gamma, inner)

    return SystemDef(
        n=n, m=m, a=a, phi=phi, lam=lam,
        name=f"harmonic_map[{target.name}]", smoothness="C^infinity",
        x_bound=2.0, p_bound=min(2.0, 0.9 * (target.chart_radius or np.inf)),
        q_bound=q_bound,
        chart_radius=target.chart_radius,
    )


def _metric_inverse_floor(domain_metric, n: int, samples: int = 200) -> float:
    """Smallest eigenvalue of g^{-1} over a sample box, for the record."""
    rng = np.random.default_rng(7)
    lo = np.inf
    for _ in range(samples):
        x = rng.uniform(-1.0, 1.0, size=n)
        ginv = np.linalg.inv(np.asarray(domain_metric(x), dtype=np.float64))
        lo = min(lo, float(np.linalg.eigvalsh(0.5 * (ginv + ginv.T))[0]))
    return lo


# ---------------------------------------------------------------------------
# registries
# ---------------------------------------------------------------------------

TARGET_REGISTRY: dict[str, Callable[..., TargetManifold]] = {
    "euclidean": euclidean_target,
    "sphere": sphere_stereographic_target,
    "hyperbolic": hyperbolic_disk_target,
}


def _build_poisson(n: int, params: dict) -> SystemDef:
    return poisson_system(
        n,
        const=params.get("const", 0.0),
        linear=np.asarray(params["linear"], dtype=np.float64)
        if "linear" in params else None,
        m=int(params.get("m", 1)),
    )


def _build_minimal_surface(n: int, params: dict) -> SystemDef:
    return minimal_surface_system(n, q_bound=float(params.get("q_bound", 1.0)))


def _build_pmc(n: int, params: dict) -> SystemDef:
    return prescribed_mean_curvature_system(
        n,
        mean_curvature=float(params.get("mean_curvature", 0.0)),
        q_bound=float(params.get("q_bound", 1.0)),
    )


def _build_harmonic_map(n: int, params: dict) -> SystemDef:
    target_name = params.get("target", "sphere")
    if target_name not in TARGET_REGISTRY:
        raise ValueError(
            f"unknown target {target_name!r}; known: {sorted(TARGET_REGISTRY)}"
        )
    target = TARGET_REGISTRY[target_name](int(params.get("target_dim", 2)))
    return harmonic_map_system(n, target,
                               q_bound=float(params.get("q_bound", 1.0)))


SYSTEM_REGISTRY: dict[str, Callable[[int, dict], SystemDef]] = {
    "poisson": _build_poisson,
    "minimal_surface": _build_minimal_surface,
    "prescribed_mean_curvature": _build_pmc,
    "harmonic_map": _build_harmonic_map,
}


def build_system(name: str, n: int, params: dict | None = None) -> SystemDef:
    """Look up a registered system builder and apply it."""
    if name not in SYSTEM_REGISTRY:
        raise ValueError(
            f"unknown system {name!r}; known: {sorted(SYSTEM_REGISTRY)}"
        )
    return SYSTEM_REGISTRY[name](n, params or {})


def register_system(name: str,
                    builder: Callable[[int, dict], SystemDef]) -> None:
    SYSTEM_REGISTRY[name] = builder


def register_target(name: str,
                    builder: Callable[..., TargetManifold]) -> None:
    TARGET_REGISTRY[name] = builder
