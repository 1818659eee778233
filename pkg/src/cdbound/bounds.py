"""Explicit resistance and diameter bounds under CD(K, n), and the pipeline
that checks them against computed distances on a concrete graph."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .curvature import CurvatureResult, curvature
from .graph import WeightedGraph, combinatorial_distances, degree_ratio
from .resistance import (
    DEFAULT_TOL,
    ResistanceSolution,
    ResistanceSolverError,
    candidate_pairs,
    solve_pairs,
)

SCHEMA_VERSION = 1
ARCSIN_SLACK = 1e-12

VERIFIED = "verified"
INAPPLICABLE = "inapplicable_nonpositive_K"
SOLVER_INCOMPLETE = "solver_incomplete"


def _arcsin_term(K: float, n: float, deg: float) -> float:
    """``arcsin(1/sqrt(Kn/(2 deg) + 1))`` with roundoff-only clamping."""
    u = 1.0 / math.sqrt(K * n / (2.0 * deg) + 1.0)
    if u > 1.0 + ARCSIN_SLACK:
        raise ArithmeticError(f"arcsin argument {u!r} exceeds 1 beyond roundoff")
    return math.asin(min(max(u, 0.0), 1.0))


def _check(K: float, *degs: float) -> None:
    if not K > 0:
        raise ValueError(f"bound needs K > 0, got {K}")
    for d in degs:
        if not d > 0:
            raise ValueError(f"bound needs positive degree ratios, got {d}")


def limit_bound_infinite_n(deg_x: float, deg_y: float, K: float) -> float:
    """``(sqrt(2 Deg(x)) + sqrt(2 Deg(y)))/K``, the ``n -> inf`` limit of the resistance bound."""
    _check(K, deg_x, deg_y)
    return (math.sqrt(2.0 * deg_x) + math.sqrt(2.0 * deg_y)) / K


def theorem_bound(deg_x: float, deg_y: float, K: float, n: float) -> float:
    """Upper bound on ``ρ(x, y)`` for a graph satisfying CD(K, n), K > 0.

    ``sqrt(n/K) * (arcsin(1/sqrt(Kn/(2Deg(x))+1)) + arcsin(1/sqrt(Kn/(2Deg(y))+1)))``
    """
    if math.isinf(n):
        return limit_bound_infinite_n(deg_x, deg_y, K)
    _check(K, deg_x, deg_y)
    if not n > 0:
        raise ValueError(f"dimension must be positive, got {n}")
    return math.sqrt(n / K) * (_arcsin_term(K, n, deg_x) + _arcsin_term(K, n, deg_y))


def corollary_bound(deg_max: float, K: float, n: float) -> float:
    """Upper bound on the hop diameter: ``sqrt(2n Deg_max/K) arcsin(1/sqrt(Kn/(2Deg_max)+1))``.

    For ``n = inf`` the limit ``2 Deg_max / K`` is returned.
    """
    _check(K, deg_max)
    if math.isinf(n):
        return 2.0 * deg_max / K
    if not n > 0:
        raise ValueError(f"dimension must be positive, got {n}")
    return math.sqrt(2.0 * n * deg_max / K) * _arcsin_term(K, n, deg_max)


def arcsin_integral_check(C: float, K: float, n: float) -> tuple[float, float]:
    """Quadrature and closed form of ``∫₀^∞ sqrt(Kn) e^{-Kt} / sqrt(C - e^{-2Kt}) dt``.

    The closed form is ``sqrt(n/K) arcsin(1/sqrt(C))``.
    """
    if not C > 1:
        raise ValueError(f"C must exceed 1, got {C}")
    if not (K > 0 and n > 0):
        raise ValueError("K and n must be positive")
    a = math.sqrt(K * n)

    def integrand(s: float) -> float:
        # t = s², dt = 2s ds; removes the 1/sqrt(t) peak when C is close to 1
        t = s * s
        denom = (C - 1.0) - math.expm1(-2.0 * K * t)
        return 2.0 * s * a * math.exp(-K * t) / math.sqrt(denom)

    # geometric breakpoints resolve the transition at s ~ sqrt((C-1)/K)
    s_peak, s_unit = math.sqrt(min(C - 1.0, 1.0) / K), math.sqrt(1.0 / K)
    knots = list(np.geomspace(s_peak, s_unit, max(2, int(math.log(s_unit / s_peak, 4)) + 2)))
    edges = [0.0, *knots, math.sqrt(10.0 / K), math.sqrt(50.0 / K)]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            total += integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-12, limit=200)[0]
    total += integrate.quad(integrand, edges[-1], np.inf, epsabs=0.0, epsrel=1e-12, limit=200)[0]
    # arcsin(1/sqrt(C)) written as arctan(1/sqrt(C-1)); well conditioned as C -> 1
    closed = math.sqrt(n / K) * math.atan(1.0 / math.sqrt(C - 1.0))
    return total, closed


def _num(v):
    if v is None:
        return None
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


@dataclass
class PairRecord:
    x0: int
    y0: int
    d: int
    rho: float
    theorem_rhs: float | None = None
    theorem_margin: float | None = None
    comparison_rhs: float | None = None
    corollary_margin: float | None = None


@dataclass
class BoundReport:
    graph_id: str
    vertices: tuple[str, ...]
    n: float
    global_k: float
    k_source: str
    status: str
    deg: list[float]
    deg_max: float
    diam_d: int | None = None
    diam_rho: float | None = None
    corollary_rhs: float | None = None
    pairs: list[PairRecord] = field(default_factory=list)
    verdicts: dict[str, bool] | None = None
    heuristic_pairs: bool = False
    solver_tol: float = DEFAULT_TOL
    tol: float = 1e-6
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.status == VERIFIED and all(self.verdicts.values())

    def to_dict(self) -> dict:
        names = self.vertices
        return {
            "schema_version": SCHEMA_VERSION,
            "graph_id": self.graph_id,
            "vertices": list(names),
            "n": _num(self.n),
            "globalK": _num(self.global_k),
            "K_source": self.k_source,
            "status": self.status,
            "Deg": {v: d for v, d in zip(names, self.deg)},
            "Deg_max": self.deg_max,
            "diam_d": self.diam_d,
            "diam_rho": _num(self.diam_rho),
            "corollary_rhs": _num(self.corollary_rhs),
            "heuristic_pairs": self.heuristic_pairs,
            "tol": self.tol,
            "solver_tol": self.solver_tol,
            "verdicts": self.verdicts,
            "error": self.error,
            "pairs": [
                {
                    "x0": names[p.x0],
                    "y0": names[p.y0],
                    "d": p.d,
                    "rho": p.rho,
                    "theorem_rhs": _num(p.theorem_rhs),
                    "theorem_margin": _num(p.theorem_margin),
                    "comparison_rhs": p.comparison_rhs,
                    "corollary_margin": _num(p.corollary_margin),
                }
                for p in self.pairs
            ],
        }

    def csv_rows(self) -> list[list]:
        header = ["schema_version", "graph_id", "n", "x0", "y0", "d", "rho", "rhs", "margin"]
        rows = [header]
        for p in self.pairs:
            rows.append([
                SCHEMA_VERSION, self.graph_id, _num(self.n), self.vertices[p.x0], self.vertices[p.y0],
                p.d, repr(p.rho), "" if p.theorem_rhs is None else repr(p.theorem_rhs),
                "" if p.theorem_margin is None else repr(p.theorem_margin),
            ])
        return rows


def verify_graph(
    G: WeightedGraph,
    n: float,
    tol: float = 1e-6,
    solver_tol: float = DEFAULT_TOL,
    K_override: float | None = None,
    graph_id: str = "graph",
    workers: int = 1,
    solutions: dict[tuple[int, int], ResistanceSolution] | None = None,
    curv: CurvatureResult | None = None,
) -> BoundReport:
    """Instantiate the resistance and diameter bounds with the computed curvature and check them.

    ``K`` is ``min_x K(x, n)`` unless ``K_override`` is given (the report then
    says so).  Nonpositive ``K`` yields status ``inapplicable_nonpositive_K``.
    """
    G.require_connected()
    prof = degree_ratio(G)
    if K_override is not None:
        K, source = float(K_override), "override"
    else:
        curv = curv if curv is not None else curvature(G, n, workers)
        K, source = curv.global_k, "computed"

    report = BoundReport(
        graph_id=graph_id, vertices=G.vertices, n=float(n), global_k=K, k_source=source,
        status=VERIFIED, deg=[float(v) for v in prof.values], deg_max=prof.maximum,
        tol=tol, solver_tol=solver_tol,
    )
    dist = combinatorial_distances(G)
    report.diam_d = dist.diameter

    pair_list, report.heuristic_pairs = candidate_pairs(G)
    if solutions is None:
        try:
            solutions = solve_pairs(G, pair_list, solver_tol, workers)
        except ResistanceSolverError as exc:
            report.status = SOLVER_INCOMPLETE
            report.error = str(exc)
            return report

    comp = math.sqrt(prof.maximum / 2.0)
    applicable = K > 0 and not math.isinf(K)
    if applicable:
        report.corollary_rhs = corollary_bound(prof.maximum, K, n)
    for (x, y) in pair_list:
        sol = solutions[(x, y)]
        rec = PairRecord(x, y, dist(x, y), sol.rho, comparison_rhs=comp * sol.rho)
        if applicable:
            rec.theorem_rhs = theorem_bound(prof[x], prof[y], K, n)
            rec.theorem_margin = rec.theorem_rhs - sol.rho
            rec.corollary_margin = report.corollary_rhs - rec.d
        report.pairs.append(rec)
    report.diam_rho = max((p.rho for p in report.pairs), default=0.0)

    if not applicable:
        report.status = INAPPLICABLE
        return report
    report.verdicts = {
        "resistance_bound": all(p.theorem_margin >= -tol for p in report.pairs),
        "diameter_bound": report.diam_d <= report.corollary_rhs + tol,
        "distance_comparison": all(p.d <= p.comparison_rhs + tol for p in report.pairs),
    }
    return report


@dataclass
class SweepResult:
    reports: list[BoundReport]
    best_n: float | None
    best_bound: float | None

    @property
    def applicable(self) -> list[BoundReport]:
        return [r for r in self.reports if r.status == VERIFIED]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "entries": [
                {
                    "n": _num(r.n),
                    "globalK": _num(r.global_k),
                    "status": r.status,
                    "corollary_rhs": _num(r.corollary_rhs),
                    "diam_d": r.diam_d,
                    "diam_rho": _num(r.diam_rho),
                    "max_theorem_rhs": _num(max((p.theorem_rhs for p in r.pairs if p.theorem_rhs is not None), default=None)),
                    "passed": r.passed if r.status == VERIFIED else None,
                }
                for r in self.reports
            ],
            "applicable_count": len(self.applicable),
            "best_n": _num(self.best_n),
            "best_corollary_rhs": _num(self.best_bound),
        }


def best_dimension_sweep(
    G: WeightedGraph,
    n_grid,
    tol: float = 1e-6,
    solver_tol: float = DEFAULT_TOL,
    graph_id: str = "graph",
    workers: int = 1,
) -> SweepResult:
    """Run ``verify_graph`` for every ``n`` and pick the one minimizing the diameter bound.

    Resistance distances do not depend on ``n`` and are solved once.
    """
    grid = [float(v) for v in n_grid]
    if not grid or any(not v > 0 for v in grid) or any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("n grid must be nonempty, positive and ascending")
    G.require_connected()
    solutions = None
    try:
        solutions = solve_pairs(G, candidate_pairs(G)[0], solver_tol, workers)
    except ResistanceSolverError:
        pass
    reports = [
        verify_graph(G, n, tol, solver_tol, graph_id=graph_id, workers=workers, solutions=solutions)
        for n in grid
    ]
    ok = [r for r in reports if r.status == VERIFIED]
    if not ok:
        return SweepResult(reports, None, None)
    best = min(ok, key=lambda r: r.corollary_rhs)
    return SweepResult(reports, best.n, best.corollary_rhs)
