"""Independent reference computations used to certify the main operators.

Nothing in here shares stencil or quadrature code with the modules under
test: the Laplacian reference rebuilds its own neighbor table from raw
coordinates, and the closed forms below were derived by hand and are
re-checked symbolically in the test suite.
"""

from __future__ import annotations

import math

import numpy as np

from .grid import BallGrid, ScalarField


def uniform_ball_potential(n: int, R: float, x) -> float:
    """Newtonian potential of f = 1 on B_R, evaluated at x.

    Closed forms (u solves laplace(u) = -1, radially symmetric, with the
    additive constant fixed by integrating the fundamental solution over
    B_R at the origin):

        n = 3:  u(x) = R^2/2 - |x|^2/6
        n = 2:  u(x) = R^2 (1 - 2 ln R)/4 - |x|^2/4
    """
    x = np.asarray(x, dtype=np.float64)
    r2 = float(np.dot(x, x))
    if n == 3:
        return R * R / 2.0 - r2 / 6.0
    if n == 2:
        return R * R * (1.0 - 2.0 * math.log(R)) / 4.0 - r2 / 4.0
    raise ValueError(f"n must be 2 or 3, got {n}")


def exhaustive_holder(f_1d_section, alpha: float, resolution: int,
                      halfwidth: float = 1.0) -> float:
    """Brute-force Hölder seminorm of a 1-D section by a full pair scan.

    f_1d_section is a callable on [-halfwidth, halfwidth]; every pair of the
    dense sample is inspected, so this is O(resolution^2) and meant only to
    certify the pair-sampled seminorm on separable test functions.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    t = np.linspace(-halfwidth, halfwidth, resolution)
    v = np.asarray([f_1d_section(ti) for ti in t], dtype=np.float64)
    best = 0.0
    for i in range(resolution - 1):
        dt = t[i + 1:] - t[i]
        q = np.abs(v[i + 1:] - v[i]) / dt**alpha
        m = float(q.max())
        if m > best:
            best = m
    return best


def fd_laplacian_reference(field: ScalarField) -> ScalarField:
    """Plain 2nd-order central Laplacian, coded independently of grid stencils.

    The neighbor table is rebuilt here from raw node coordinates.  Values are
    only meaningful where the full central stencil exists (all interior nodes
    qualify); other nodes are set to zero.
    """
    grid = field.grid
    nodes = grid.nodes
    h = grid.h
    lat = np.rint((nodes + grid.R) / h).astype(np.int64)
    table = {tuple(row): k for k, row in enumerate(lat)}
    out = np.zeros(grid.node_count)
    f = field.values
    for k in range(grid.node_count):
        acc = 0.0
        ok = True
        base = lat[k]
        for d in range(grid.n):
            up = list(base)
            dn = list(base)
            up[d] += 1
            dn[d] -= 1
            iu = table.get(tuple(up))
            idn = table.get(tuple(dn))
            if iu is None or idn is None:
                ok = False
                break
            acc += f[iu] + f[idn]
        if ok:
            out[k] = (acc - 2 * grid.n * f[k]) / (h * h)
    return ScalarField(grid, out)


def ball_lattice_count(n: int, R: float, res: int) -> int:
    """Count lattice points of the res^n cube inside the closed ball.

    Triple-checked enumeration loop, independent of build_grid's masking.
    """
    axis = np.linspace(-R, R, res)
    count = 0
    if n == 2:
        for a in axis:
            for b in axis:
                if a * a + b * b <= R * R * (1.0 + 1e-12):
                    count += 1
        return count
    if n == 3:
        for a in axis:
            for b in axis:
                for c in axis:
                    if a * a + b * b + c * c <= R * R * (1.0 + 1e-12):
                        count += 1
        return count
    raise ValueError(f"n must be 2 or 3, got {n}")
