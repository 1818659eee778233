"""Resistance distance ρ(x, y) = sup{ |f(y) - f(x)| : ‖Γf‖_∞ <= 1 }.

The supremum is a convex program: maximize ``f(y0)`` under ``f(x0) = 0`` and
the |V| ellipsoidal-cylinder constraints ``Γf(x) <= 1``.  It is solved with a
logarithmic-barrier interior-point method (damped Newton, backtracking line
search).  Every answer carries a certificate: the barrier multipliers
``μ_x = 1/(t(1 - Γf(x)))`` define a Lagrangian dual bound

    g(μ) = Σ μ_x + ½ eᵀ (Σ μ_x A_x)⁻¹ e   >=   ρ,

where ``Γf(x) = ½ fᵀA_x f``; the gap ``g(μ) - f(y0)`` is reported as the
KKT residual.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.linalg

from .graph import WeightedGraph, combinatorial_distances, degree_ratio

NEWTON_MAX = 50
OUTER_MAX = 60
EXACT_PAIR_LIMIT = 300
DEFAULT_TOL = 1e-8
ACTIVE_TOL = 1e-6
NEWTON_EPS = 1e-9


class ResistanceSolverError(RuntimeError):
    def __init__(self, message: str, last_iterate: np.ndarray | None = None):
        super().__init__(message)
        self.last_iterate = last_iterate


@dataclass(frozen=True)
class ResistanceSolution:
    source: int
    target: int
    rho: float
    optimizer: np.ndarray
    kkt_residual: float
    upper_bound: float
    active_vertices: tuple[int, ...]
    newton_steps: int = 0

    def to_dict(self, G: WeightedGraph) -> dict:
        return {
            "source": G.vertices[self.source],
            "target": G.vertices[self.target],
            "rho": self.rho,
            "kkt_residual": self.kkt_residual,
            "upper_bound": self.upper_bound,
            "active_vertices": [G.vertices[i] for i in self.active_vertices],
            "f": {v: float(x) for v, x in zip(G.vertices, self.optimizer)},
        }


def _gamma_sq(G: WeightedGraph, f: np.ndarray) -> np.ndarray:
    diff = f[None, :] - f[:, None]
    return (G.weight * diff**2).sum(axis=1) / (2.0 * G.measure)


def _constraint_gradients(G: WeightedGraph, f: np.ndarray) -> np.ndarray:
    """Column x holds ``A_x f``, the gradient of ``Γf(x)``."""
    P = G.weight * (f[None, :] - f[:, None]) / G.measure[:, None]
    Gm = P.T.copy()
    Gm[np.diag_indices_from(Gm)] = -P.sum(axis=1)
    return Gm


def _weighted_form(G: WeightedGraph, mu: np.ndarray) -> np.ndarray:
    """``Σ_x mu_x A_x`` as a dense matrix (a weighted graph Laplacian)."""
    a = mu / G.measure
    C = G.weight * (a[:, None] + a[None, :])
    return np.diag(C.sum(axis=1)) - C


def _solve_pd(H: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Jacobi scaling first: barrier Hessians are badly scaled near active constraints
    d = 1.0 / np.sqrt(np.diag(H))
    Hs = H * d[:, None] * d[None, :]
    try:
        return d * scipy.linalg.cho_solve(scipy.linalg.cho_factor(Hs), d * b)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        return d * np.linalg.lstsq(Hs, d * b, rcond=None)[0]


def _dual_bound(G: WeightedGraph, mu: np.ndarray, free: np.ndarray, target_pos: int) -> float:
    H = _weighted_form(G, mu)[np.ix_(free, free)]
    e = np.zeros(len(free))
    e[target_pos] = 1.0
    try:
        c, low = scipy.linalg.cho_factor(H)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        return math.inf
    return float(mu.sum() + 0.5 * e @ scipy.linalg.cho_solve((c, low), e))


def resistance_distance(G: WeightedGraph, x0, y0, tol: float = DEFAULT_TOL) -> ResistanceSolution:
    """Maximize ``f(y0) - f(x0)`` subject to ``Γf <= 1`` with ``f(x0) = 0``.

    Raises ``ResistanceSolverError`` when the Newton or outer iteration caps
    are exceeded; the exception carries the last iterate.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    G.require_connected()
    x0, y0 = G.vertex_index(x0), G.vertex_index(y0)
    N = len(G)
    if x0 == y0:
        return ResistanceSolution(x0, y0, 0.0, np.zeros(N), 0.0, 0.0, ())

    free = np.array([i for i in range(N) if i != x0])
    target_pos = int(np.flatnonzero(free == y0)[0])
    f = np.zeros(N)
    t = 1.0
    steps = 0

    def barrier_change(s_old: np.ndarray, fv: np.ndarray, df_target: float, tv: float) -> float:
        # φ(new) - φ(old), formed from differences to avoid cancellation at large t
        s_new = 1.0 - _gamma_sq(G, fv)
        if np.any(s_new <= 0):
            return math.inf
        return -tv * df_target - float(np.log1p((s_new - s_old) / s_old).sum())

    for _ in range(OUTER_MAX):
        for it in range(NEWTON_MAX + 1):
            s = 1.0 - _gamma_sq(G, f)
            Gm = _constraint_gradients(G, f)
            grad = Gm @ (1.0 / s)
            grad[y0] -= t
            H = _weighted_form(G, 1.0 / s) + (Gm / s**2) @ Gm.T
            g, Hf = grad[free], H[np.ix_(free, free)]
            step = -_solve_pd(Hf, g)
            dec2 = float(-g @ step)
            if dec2 / 2.0 <= NEWTON_EPS:
                break
            if it == NEWTON_MAX:
                raise ResistanceSolverError(
                    f"Newton did not converge in {NEWTON_MAX} steps at t={t:.1e}", f.copy()
                )
            alpha = 1.0
            full = np.zeros(N)
            full[free] = step
            while alpha >= 1e-14:
                trial = f + alpha * full
                if barrier_change(s, trial, alpha * full[y0], t) <= -0.25 * alpha * dec2:
                    break
                alpha *= 0.5
            else:
                # roundoff floor: no representable descent left, the dual bound decides
                break
            f = trial
            steps += 1

        s = 1.0 - _gamma_sq(G, f)
        mu = 1.0 / (t * s)
        lower = float(f[y0])
        upper = _dual_bound(G, mu, free, target_pos)
        gap = upper - lower
        if N / t <= tol and gap <= tol:
            active = tuple(int(i) for i in np.flatnonzero(s <= ACTIVE_TOL))
            return ResistanceSolution(x0, y0, lower, f, max(gap, 0.0), upper, active, steps)
        t *= 10.0

    raise ResistanceSolverError(f"no certified solution after {OUTER_MAX} barrier stages", f)


@dataclass(frozen=True)
class ResistanceDiameter:
    value: float
    pair: tuple[int, int]
    heuristic: bool
    solutions: dict[tuple[int, int], ResistanceSolution] = field(repr=False)


def candidate_pairs(G: WeightedGraph, limit: int = EXACT_PAIR_LIMIT) -> tuple[list[tuple[int, int]], bool]:
    """All unordered pairs, or a farthest-pair shortlist above ``limit`` vertices."""
    N = len(G)
    if N <= limit:
        return list(combinations(range(N), 2)), False
    D = combinatorial_distances(G).entries
    cut = max(1, D.max() - 1)
    i, j = np.nonzero(np.triu(D >= cut))
    return [(int(a), int(b)) for a, b in zip(i, j)], True


def solve_pairs(G: WeightedGraph, pair_list, tol: float, workers: int = 1) -> dict[tuple[int, int], ResistanceSolution]:
    def one(p):
        return resistance_distance(G, p[0], p[1], tol)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            sols = list(pool.map(one, pair_list))
    else:
        sols = [one(p) for p in pair_list]
    return dict(zip(pair_list, sols))


def resistance_diameter(G: WeightedGraph, tol: float = DEFAULT_TOL, workers: int = 1) -> ResistanceDiameter:
    G.require_connected()
    if len(G) == 1:
        return ResistanceDiameter(0.0, (0, 0), False, {})
    pair_list, heuristic = candidate_pairs(G)
    sols = solve_pairs(G, pair_list, tol, workers)
    best = max(sols, key=lambda p: sols[p].rho)
    return ResistanceDiameter(sols[best].rho, best, heuristic, sols)


@dataclass(frozen=True)
class DistanceComparison:
    x: int
    y: int
    d: int
    rho: float
    bound: float
    ratio: float
    holds: bool


def check_distance_comparison(
    G: WeightedGraph,
    tol: float = 1e-6,
    solutions: dict[tuple[int, int], ResistanceSolution] | None = None,
    solver_tol: float = DEFAULT_TOL,
) -> list[DistanceComparison]:
    """Check ``d(x,y) <= sqrt(Deg_max/2) ρ(x,y) + tol`` on every pair.

    ``ratio`` is ``d / (sqrt(Deg_max/2) ρ)``; 1 means the comparison is tight.
    """
    D = combinatorial_distances(G).entries
    c = math.sqrt(degree_ratio(G).maximum / 2.0)
    if solutions is None:
        solutions = solve_pairs(G, candidate_pairs(G)[0], solver_tol)
    out = []
    for (x, y), sol in sorted(solutions.items()):
        d = int(D[x, y])
        bound = c * sol.rho
        out.append(DistanceComparison(x, y, d, sol.rho, bound, d / bound if bound > 0 else math.inf, d <= bound + tol))
    return out
