"""Executable-lemma suite: run every inequality check on a fixed battery.

Each entry returns a JSON-friendly block with pass/fail, the battery size,
and the measured constants (worst observed ratios), so a report records
not just that an inequality held but how much slack it had.
"""

from __future__ import annotations

import numpy as np

from .grid import ScalarField, build_grid, build_pair_set
from .holder import (check_banach_algebra, check_norm_comparison,
                     check_taylor_remainder, holder_norm, jet_norm,
                     taylor_remainder_ratio)
from .oracle import uniform_ball_potential
from .potential import (check_potential_norm_bound, laplacian_consistency,
                        newtonian_potential)
from .probes import constant_probe, lemma_battery, with_zero_jet


def run_lemma_suite(n: int = 2, R: float = 1.0, res: int = 17,
                    alpha: float = 0.5, seed: int = 0,
                    pair_cap: int = 200_000) -> dict:
    """Run all lemma checks; returns {'lemmas': [...], 'all_passed': bool}."""
    grid = build_grid(n, R, res)
    pairs = build_pair_set(grid, seed=seed, cap=pair_cap)
    battery = lemma_battery(n)
    blocks = [
        _taylor_block(battery, grid, pairs, alpha),
        _banach_block(battery, grid, pairs, alpha),
        _comparison_block(battery, grid, pairs, alpha, n),
        _closed_form_block(n, R),
        _laplacian_block(n, R),
        _amplification_block(battery, grid, pairs, alpha),
    ]
    return {
        "lemmas": blocks,
        "all_passed": all(b["passed"] for b in blocks),
        "battery_size": len(battery),
        "grid": {"n": n, "R": R, "res": res, "nodes": grid.node_count,
                 "pairs": int(pairs.size), "alpha": alpha},
    }


def _taylor_block(battery, grid, pairs, alpha) -> dict:
    ratios = {}
    violations = []
    for probe in battery:
        f = probe.field(grid)
        ratio = taylor_remainder_ratio(f, alpha, pairs)
        ratios[probe.name] = ratio
        if not check_taylor_remainder(f, alpha, pairs):
            violations.append(probe.name)
    return {
        "name": "taylor_remainder",
        "statement": "second-order remainder bounded by the summed "
                     "Hoelder seminorms of the pure second derivatives",
        "passed": not violations,
        "battery_size": len(battery),
        "violations": violations,
        "worst_ratio": max(ratios.values()),
        "worst_probe": max(ratios, key=ratios.get),
    }


def _banach_block(battery, grid, pairs, alpha) -> dict:
    fields = [(p.name, p.field(grid)) for p in battery]
    norms = {name: holder_norm(f, alpha, pairs).weighted
             for name, f in fields}
    worst = 0.0
    worst_pair = None
    violations = []
    for i in range(len(fields)):
        for j in range(i, len(fields)):
            (na, fa), (nb, fb) = fields[i], fields[j]
            if not check_banach_algebra(fa, fb, alpha, pairs):
                violations.append([na, nb])
            denom = norms[na] * norms[nb]
            if denom > 0:
                prod = ScalarField(grid, fa.values * fb.values)
                ratio = holder_norm(prod, alpha, pairs).weighted / denom
                if ratio > worst:
                    worst, worst_pair = ratio, [na, nb]
    return {
        "name": "banach_algebra",
        "statement": "||fg|| <= ||f|| ||g|| for the weighted Hoelder norm",
        "passed": not violations,
        "battery_size": len(fields),
        "violations": violations,
        "worst_ratio": worst,
        "worst_pair": worst_pair,
    }


def _comparison_block(battery, grid, pairs, alpha, n) -> dict:
    base = 3.0 * n * grid.R
    worst0 = worst1 = 0.0
    violations = []
    count = 0
    for probe in battery:
        zp = with_zero_jet(probe, n)
        f = zp.field(grid)
        count += 1
        if not check_norm_comparison(f, alpha, pairs):
            violations.append(probe.name)
        rep = jet_norm(f, alpha, pairs)
        top = rep.orders[2]
        if top > 0:
            worst0 = max(worst0, rep.orders[0] / (base**2 * top))
            worst1 = max(worst1, rep.orders[1] / (base * top))
    return {
        "name": "norm_comparison",
        "statement": "zero-jet fields: order-0 and order-1 norms bounded "
                     "by (3nR)^2 and (3nR) times the order-2 norm",
        "passed": not violations,
        "battery_size": count,
        "violations": violations,
        "worst_ratio_order0": worst0,
        "worst_ratio_order1": worst1,
    }


def _closed_form_block(n, R, res: int = 17, tol: float = 0.03) -> dict:
    grid = build_grid(n, R, res)
    probe = constant_probe(n)
    pot = newtonian_potential(probe.field(grid), grid)
    exact = np.array([uniform_ball_potential(n, R, x) for x in grid.nodes])
    err = float(np.abs(pot.values - exact).max() / np.abs(exact).max())
    return {
        "name": "potential_closed_form",
        "statement": "Newtonian potential of the constant source matches "
                     "the uniform-ball closed form",
        "passed": err <= tol,
        "relative_sup_error": err,
        "tolerance": tol,
        "res": res,
    }


def _laplacian_block(n, R, res: int = 17, tol: float = 0.05) -> dict:
    grid = build_grid(n, R, res)
    probe = constant_probe(n)
    rep = laplacian_consistency(probe.field(grid), grid)
    return {
        "name": "laplacian_consistency",
        "statement": "Hessian-trace and finite-difference routes to the "
                     "potential's Laplacian agree with the negated source",
        "passed": rep["max_relative_gap"] <= tol,
        "max_relative_gap": rep["max_relative_gap"],
        "trace_route_gap": rep["trace_gap"],
        "fd_route_gap": rep["fd_gap"],
        "tolerance": tol,
        "res": res,
    }


def _amplification_block(battery, grid, pairs, alpha, cap: float = 10.0) -> dict:
    report = check_potential_norm_bound(battery[:6], grid, alpha, pairs=pairs)
    return {
        "name": "potential_norm_bound",
        "statement": "second-order norm of the potential bounded by a "
                     "moderate multiple of the source norm",
        "passed": bool(report.max_ratio < cap),
        "max_ratio": report.max_ratio,
        "cap": cap,
        "n_probes": len(report.ratios),
    }
