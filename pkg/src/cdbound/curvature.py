"""Bakry-Émery operators Γ, Γ₂ and the pointwise curvature function K(x, n).

``K(x, n)`` is the largest ``K`` such that

    Γ₂f(x) >= (1/n) (Δf(x))² + K Γf(x)    for every f.

All three forms are local: with the gauge ``f(x) = 0`` they are quadratic
forms in the values of ``f`` on the punctured 2-ball around ``x``.  The
dimension ``n`` ranges over ``(0, inf]``; ``math.inf`` drops the ``1/n``
term exactly.  An isolated vertex has ``K = +inf`` by convention.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graph import WeightedGraph, laplacian_apply

PSD_RTOL = 1e-12
SPHERE2_COND_MAX = 1e12
ORACLE_MAX_BALL = 40


class CurvatureError(RuntimeError):
    pass


def inverse_dimension(n: float) -> float:
    n = float(n)
    if not n > 0:
        raise ValueError(f"dimension must lie in (0, inf], got {n}")
    return 0.0 if math.isinf(n) else 1.0 / n


def gamma(G: WeightedGraph, f, g=None) -> np.ndarray:
    """Carré du champ from its definition ``2Γ(f,g) = Δ(fg) - fΔg - gΔf``."""
    f = G.field(f)
    g = f if g is None else G.field(g)
    return 0.5 * (laplacian_apply(G, f * g) - f * laplacian_apply(G, g) - g * laplacian_apply(G, f))


def gamma_sum(G: WeightedGraph, f, g=None) -> np.ndarray:
    """Edge-sum form ``Γ(f,g)(x) = (1/2m(x)) Σ_y w(x,y)(f(y)-f(x))(g(y)-g(x))``."""
    f = G.field(f)
    g = f if g is None else G.field(g)
    df = f[None, :] - f[:, None]
    dg = g[None, :] - g[:, None]
    return (G.weight * df * dg).sum(axis=1) / (2.0 * G.measure)


def gamma2(G: WeightedGraph, f, g=None) -> np.ndarray:
    """``2Γ₂(f,g) = ΔΓ(f,g) - Γ(f,Δg) - Γ(g,Δf)``."""
    f = G.field(f)
    g = f if g is None else G.field(g)
    lf, lg = laplacian_apply(G, f), laplacian_apply(G, g)
    return 0.5 * (laplacian_apply(G, gamma(G, f, g)) - gamma(G, f, lg) - gamma(G, g, lf))


def cd_slack(G: WeightedGraph, f, K: float, n: float) -> np.ndarray:
    """Pointwise ``Γ₂f - (1/n)(Δf)² - KΓf``; nonnegative everywhere iff CD(K,n) holds for f."""
    lf = laplacian_apply(G, f)
    return gamma2(G, f) - inverse_dimension(n) * lf**2 - K * gamma(G, f)


@dataclass(frozen=True)
class LocalCurvatureForms:
    """Quadratic forms of Γ, Γ₂ and Δ at ``center`` in the gauge ``f(center) = 0``.

    ``coords`` lists graph indices of the punctured 2-ball, sphere-1 first;
    ``n_sphere1`` of them lie at distance one.
    """

    center: int
    coords: np.ndarray
    n_sphere1: int
    gamma_form: np.ndarray
    gamma2_form: np.ndarray
    lap_row: np.ndarray

    @property
    def sphere1(self) -> np.ndarray:
        return self.coords[: self.n_sphere1]

    @property
    def sphere2(self) -> np.ndarray:
        return self.coords[self.n_sphere1 :]

    def lift(self, G: WeightedGraph, u) -> np.ndarray:
        """Embed local coordinates ``u`` as a field on ``G`` (zero off the ball)."""
        f = np.zeros(len(G))
        f[self.coords] = u
        return f

    def restrict(self, f) -> np.ndarray:
        """Local coordinates of a field after subtracting ``f(center)``."""
        f = np.asarray(f, dtype=float)
        return f[self.coords] - f[self.center]

    def q_form(self, n: float) -> np.ndarray:
        return self.gamma2_form - inverse_dimension(n) * np.outer(self.lap_row, self.lap_row)


def local_forms(G: WeightedGraph, x) -> LocalCurvatureForms:
    """Assemble the local forms at ``x`` from the edge-sum expressions.

    Only rows of the ball ``B₁(x)`` and columns of ``B₂(x)`` of the weight
    matrix enter, so the cost does not depend on the size of ``G``.
    """
    x = G.vertex_index(x)
    s1 = np.array(sorted(G.neighbors[x]), dtype=int)
    ball1 = set(s1.tolist()) | {x}
    s2 = sorted({int(z) for y in s1 for z in G.neighbors[y]} - ball1)
    coords = np.concatenate([s1, np.array(s2, dtype=int)]).astype(int)
    k, k1 = len(coords), len(s1)

    idx = np.concatenate([[x], coords])            # ball B₂, center first
    rows = idx[: k1 + 1]                           # ball B₁
    F = np.vstack([np.zeros(k), np.eye(k)])        # basis fields on idx, gauged
    Wr = G.weight[np.ix_(rows, idx)]
    mr = G.measure[rows]
    deg = G.degree[rows]

    LF = (Wr @ F - deg[:, None] * F[: k1 + 1]) / mr[:, None]

    def gamma_at(r: int) -> np.ndarray:
        D = F - F[r]
        return (D.T * Wr[r]) @ D / (2.0 * mr[r])

    G_center = gamma_at(0)
    wx = Wr[0, 1 : k1 + 1]
    half_lap_gamma = sum(w * (gamma_at(r) - G_center) for r, w in enumerate(wx, 1)) / (2.0 * mr[0])
    Dx = F[1 : k1 + 1]
    DLx = LF[1:] - LF[0]
    B = (Dx.T * wx) @ DLx / (2.0 * mr[0])
    gamma2_form = half_lap_gamma - 0.5 * (B + B.T)
    gamma2_form = 0.5 * (gamma2_form + gamma2_form.T)

    return LocalCurvatureForms(
        center=x,
        coords=coords,
        n_sphere1=k1,
        gamma_form=G_center,
        gamma2_form=gamma2_form,
        lap_row=LF[0].copy(),
    )


def _psd_tol(M: np.ndarray) -> float:
    return PSD_RTOL * max(np.abs(M).sum(axis=0).max(initial=0.0), 1.0)


@dataclass(frozen=True)
class _Reduced:
    forms: LocalCurvatureForms
    dinv_sqrt: np.ndarray
    schur: np.ndarray
    coupling: np.ndarray   # Q22^{-1} Q21


def _reduce(forms: LocalCurvatureForms, n: float) -> _Reduced:
    Q = forms.q_form(n)
    k1 = forms.n_sphere1
    Q11, Q12, Q22 = Q[:k1, :k1], Q[:k1, k1:], Q[k1:, k1:]
    if Q22.size:
        ev = np.linalg.eigvalsh(Q22)
        if ev[0] <= 0 or ev[-1] / ev[0] > SPHERE2_COND_MAX:
            raise CurvatureError(
                f"sphere-2 block at vertex {forms.center} is not safely positive definite "
                f"(eigenvalues in [{ev[0]:.3e}, {ev[-1]:.3e}])"
            )
        coupling = np.linalg.solve(Q22, Q12.T)
        S = Q11 - Q12 @ coupling
    else:
        coupling = np.zeros((0, k1))
        S = Q11
    d = np.diag(forms.gamma_form)[:k1]
    dinv_sqrt = 1.0 / np.sqrt(d)
    return _Reduced(forms, dinv_sqrt, 0.5 * (S + S.T), coupling)


def _min_eig(R: _Reduced):
    M = R.dinv_sqrt[:, None] * R.schur * R.dinv_sqrt[None, :]
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    return w[0], V[:, 0]


def curvature_at(G: WeightedGraph, x, n: float, forms: LocalCurvatureForms | None = None) -> float:
    """Largest ``K`` with ``Γ₂ - (1/n)(Δ)² - KΓ ⪰ 0`` at ``x``.

    The sphere-2 variables are eliminated by a Schur complement (Γ vanishes
    there and Γ₂ is positive definite there), then ``K`` is the smallest
    eigenvalue of ``D^{-1/2} S D^{-1/2}`` with ``D`` the diagonal Γ block.
    """
    forms = local_forms(G, x) if forms is None else forms
    if forms.n_sphere1 == 0:
        return math.inf
    R = _reduce(forms, n)
    k = float(_min_eig(R)[0])
    # values inside the PSD tolerance are roundoff around an exact zero
    scale = _psd_tol(R.dinv_sqrt[:, None] * R.schur * R.dinv_sqrt[None, :])
    return 0.0 if abs(k) <= scale else k


def curvature_oracle(G: WeightedGraph, x, n: float, tol: float = 1e-10) -> float:
    """Bisection on ``K`` using the full-matrix PSD test; independent of the Schur route."""
    forms = local_forms(G, x)
    if forms.n_sphere1 == 0:
        return math.inf
    if len(forms.coords) + 1 > ORACLE_MAX_BALL:
        raise CurvatureError(
            f"2-ball at vertex {forms.center} has {len(forms.coords) + 1} vertices; "
            f"oracle limit is {ORACLE_MAX_BALL}"
        )
    Q = forms.q_form(n)
    Gm = forms.gamma_form

    def psd(K: float) -> bool:
        M = Q - K * Gm
        return np.linalg.eigvalsh(M)[0] >= -_psd_tol(M)

    gmin = np.diag(Gm)[: forms.n_sphere1].min()
    B = (np.abs(Q).sum(axis=0).max() + 1.0) / gmin
    hi = B
    lo = -B
    for _ in range(200):
        if psd(lo):
            break
        lo *= 2.0
    else:
        raise CurvatureError("oracle could not bracket the curvature from below")
    while hi - lo > tol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        if psd(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class CurvatureResult:
    n: float
    per_vertex: np.ndarray
    vertices: tuple[str, ...]

    @property
    def global_k(self) -> float:
        return float(self.per_vertex.min())

    def to_dict(self) -> dict:
        return {
            "n": _num(self.n),
            "vertices": list(self.vertices),
            "perVertex": {v: _num(k) for v, k in zip(self.vertices, self.per_vertex)},
            "globalK": _num(self.global_k),
        }


def _num(v: float):
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def curvature(G: WeightedGraph, n: float, workers: int = 1) -> CurvatureResult:
    """``K(x, n)`` at every vertex."""
    inverse_dimension(n)
    xs = range(len(G))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            ks = list(pool.map(lambda x: curvature_at(G, x, n), xs))
    else:
        ks = [curvature_at(G, x, n) for x in xs]
    return CurvatureResult(n=float(n), per_vertex=np.array(ks), vertices=G.vertices)


@dataclass(frozen=True)
class CDVerdict:
    holds: bool
    K: float
    n: float
    min_curvature: float
    vertex: int | None = None
    witness: np.ndarray | None = None
    witness_slack: float | None = None


def verify_cd(G: WeightedGraph, K: float, n: float) -> CDVerdict:
    """Decide CD(K, n); on failure return a field violating it at some vertex.

    The check passes iff ``min_x K(x, n) >= K - 1e-9 * max(1, |K|)``.
    """
    tol = 1e-9 * max(1.0, abs(K))
    worst, worst_x, worst_R = math.inf, None, None
    for x in range(len(G)):
        forms = local_forms(G, x)
        if forms.n_sphere1 == 0:
            continue
        R = _reduce(forms, n)
        k = curvature_at(G, x, n, forms)
        if k < worst:
            worst, worst_x, worst_R = k, x, R
    if worst >= K - tol:
        return CDVerdict(True, K, n, worst)

    _, v = _min_eig(worst_R)
    u1 = worst_R.dinv_sqrt * v
    u = np.concatenate([u1, -worst_R.coupling @ u1])
    f = worst_R.forms.lift(G, u)
    slack = float(cd_slack(G, f, K, n)[worst_x])
    return CDVerdict(False, K, n, worst, worst_x, f, slack)
