"""Busemann cocycle, kappa-norms and the cocycle upper bound.

With the identity as basepoint the Busemann cocycle is
``beta(g)(h) = |h| - |g^-1 h|``, an integer in ``[-|g|, |g|]``.  For a
finitely supported ``a`` and a scale ``eps`` the kappa-norm is

    N(a) = sup_h  sum_g |a(g)| exp(eps * beta(g)(h)),

and the norm of ``lambda(1_S)`` on l^p is at most
``N_{p eps}(1_{S^-1})^(1/p) * N_{p' eps}(1_S)^(1/p')``.

Because beta is integer valued, each ``h`` only contributes through its
histogram ``j -> sum_g |a(g)| [beta(g)(h) = j]``.  Tables store those
histograms once, after which any ``eps`` costs a tiny matrix product.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .cayley import AnnulusView, BallIndex, BallView, enumerate_ball
from .errors import InputError
from .group import Element, RewritingSystem
from .operator import SupportedFunction, conjugate_exponent

__all__ = [
    "busemann",
    "CocycleTable",
    "cocycle_table",
    "kappa_norm",
    "BoundReport",
    "cocycle_upper_bound",
    "optimize_epsilon",
    "standard_epsilon",
    "horosphere_counts",
    "case_bound",
    "poly_exp_sum",
]

GOLDEN_ITERS = 40


def busemann(rs: RewritingSystem, g, h) -> int:
    """``beta(g)(h) = |h| - |g^-1 h|``."""
    return rs.length(h) - rs.length(rs.multiply(rs.inverse(g), h))


@dataclass(eq=False)
class CocycleTable:
    """Values ``beta(g)(h)`` for ``g`` in a support and ``h`` in ``B(H)``.

    ``values[i, j]`` belongs to ``support[i]`` and ball index ``j``;
    ``offsets`` are the sphere offsets of ``B(H)``.
    """

    support: list[Element]
    weights: np.ndarray
    horizon: int
    values: np.ndarray
    offsets: np.ndarray
    exact_free: bool = False
    _profiles: dict = field(default_factory=dict, repr=False)

    def profile(self, radius: int | None = None):
        """Distinct weighted histograms of ``beta(., h)`` over ``h`` in ``B(radius)``.

        Returns ``(js, P)`` with ``P[r, k]`` the weight of support elements
        with ``beta = js[k]`` for the r-th distinct histogram.
        """
        r = self.horizon if radius is None else max(0, min(radius, self.horizon))
        if r not in self._profiles:
            n_h = int(self.offsets[r + 1])
            vals = self.values[:, :n_h]
            n = max(int(np.abs(self.values).max(initial=0)), 0)
            js = np.arange(-n, n + 1)
            width = len(js)
            flat = (np.arange(n_h)[None, :] * width + vals + n).ravel()
            wts = np.repeat(self.weights, n_h)
            P = np.bincount(flat, wts, minlength=n_h * width).reshape(n_h, width)
            P = np.unique(P, axis=0)
            self._profiles[r] = (js, P)
        return self._profiles[r]

    def log_kappa(self, eps: float, radius: int | None = None) -> float:
        js, P = self.profile(radius)
        with np.errstate(divide="ignore"):
            logs = np.log(P) + eps * js[None, :]
        return float(np.max(logsumexp(logs, axis=1)))

    def kappa(self, eps: float, radius: int | None = None) -> float:
        if eps * max((len(g) for g in self.support), default=0) > 30:
            lk = self.log_kappa(eps, radius)
            return math.exp(lk) if lk < 709 else math.inf
        js, P = self.profile(radius)
        return float(np.max(P @ np.exp(eps * js)))

    def stabilized(self, eps: float, tol: float = 1e-12) -> bool:
        if self.horizon < 2:
            return False
        a = self.log_kappa(eps)
        b = self.log_kappa(eps, self.horizon - 2)
        return abs(a - b) <= tol * max(1.0, abs(a))


def _support_weights(rs: RewritingSystem, a) -> tuple[list[Element], np.ndarray]:
    if isinstance(a, SupportedFunction):
        supp = a.support
        return supp, np.array([abs(a.coeffs[g]) for g in supp])
    if isinstance(a, AnnulusView):
        a = a.elements()
    supp = sorted({rs.normal_form(x) for x in a}, key=lambda g: g.shortlex_key)
    return supp, np.ones(len(supp))


def cocycle_table(rs: RewritingSystem, a, H: int | None = None, *,
                  ball: BallIndex | None = None) -> CocycleTable:
    """Tabulate beta on ``supp(a) x B(H)``; ``a`` is a SupportedFunction or a set.

    Default horizon is ``n_a + 4``.  Needs a ball of radius ``H + n_a``.
    """
    supp, w = _support_weights(rs, a)
    na = max((len(g) for g in supp), default=0)
    H = na + 4 if H is None else int(H)
    if H < na:
        raise InputError(f"horizon {H} is below the support radius {na}")
    if ball is None or ball.radius < H + na:
        ball = enumerate_ball(rs, H + na)
    n_h = ball.ball_size(H)
    hs = np.arange(n_h)
    len_h = ball.length[:n_h].astype(np.int64)
    vals = np.empty((len(supp), n_h), dtype=np.int64)
    for i, g in enumerate(supp):
        j = ball.apply_left(rs.inverse(g).word, hs)
        vals[i] = len_h - ball.length[j].astype(np.int64)
    return CocycleTable(supp, w, H, vals, ball.offsets[:H + 2].copy(), exact_free=rs.is_free)


def kappa_norm(rs: RewritingSystem, a, eps: float, H: int | None = None, *,
               table: CocycleTable | None = None, ball: BallIndex | None = None) -> tuple[float, bool]:
    """``(N, stabilized)`` with ``N = max_{h in B(H)} sum_g |a(g)| e^{eps beta(g)(h)}``.

    ``stabilized`` says the maximum over ``B(H - 2)`` is the same.  For free
    groups the value is the supremum over the whole group once
    ``H >= n_a``.
    """
    if eps < 0:
        raise InputError("eps must be >= 0")
    if table is None:
        table = cocycle_table(rs, a, H, ball=ball)
    return table.kappa(eps), table.stabilized(eps)


@dataclass
class BoundReport:
    S: str
    size: int
    p: float
    eps: float
    factor_minus: float
    factor_plus: float
    bound: float
    log_bound: float
    exactness: str
    horizon: int
    trivial_lower: float = float("nan")

    def to_dict(self) -> dict:
        return asdict(self)


def _as_set(rs: RewritingSystem, S) -> tuple[list[Element], str]:
    if isinstance(S, AnnulusView):
        return S.elements(), S.descriptor
    elems = sorted({rs.normal_form(x) for x in S}, key=lambda g: g.shortlex_key)
    return elems, "explicit:" + ",".join(rs.format(g) or "e" for g in elems)


class _BoundTables:
    """Cocycle tables for ``S^-1`` and ``S``, shared across scales."""

    def __init__(self, rs, S, H=None, ball=None):
        self.elems, self.descriptor = _as_set(rs, S)
        if not self.elems:
            raise InputError("S must be non-empty")
        na = max(len(g) for g in self.elems)
        self.H = na + 4 if H is None else int(H)
        if ball is None or ball.radius < self.H + na:
            ball = enumerate_ball(rs, self.H + na)
        inv = [rs.inverse(g) for g in self.elems]
        self.minus = cocycle_table(rs, inv, self.H, ball=ball)
        self.plus = cocycle_table(rs, self.elems, self.H, ball=ball)
        self.free = rs.is_free

    def log_bound(self, p, eps):
        pp = conjugate_exponent(p)
        return (self.minus.log_kappa(p * eps) / p + self.plus.log_kappa(pp * eps) / pp
                - math.log(len(self.elems)))

    def report(self, p, eps) -> BoundReport:
        pp = conjugate_exponent(p)
        fm = self.minus.kappa(p * eps)
        fp = self.plus.kappa(pp * eps)
        lb = self.log_bound(p, eps)
        if self.free:
            exact = "exact-tree"
        elif self.minus.stabilized(p * eps) and self.plus.stabilized(pp * eps):
            exact = "stabilized"
        else:
            exact = "horizon-limited"
        n = len(self.elems)
        return BoundReport(self.descriptor, n, float(p), float(eps), fm, fp, math.exp(lb), lb,
                           exact, self.H, n ** (-1 / pp))


def cocycle_upper_bound(rs: RewritingSystem, S, p: float, eps: float, H: int | None = None, *,
                        ball: BallIndex | None = None, tables: _BoundTables | None = None) -> BoundReport:
    """Cocycle bound on ``||lambda_S||_{p->p}``, normalized by ``|S|``.

    A proven upper bound when ``exactness == "exact-tree"``; otherwise the
    suprema are taken over a finite horizon and the bound is empirical.
    """
    if not 1 < p < math.inf:
        raise InputError("p must lie in (1, inf)")
    if not eps > 0:
        raise InputError("eps must be > 0")
    tables = tables or _BoundTables(rs, S, H, ball)
    return tables.report(p, eps)


def standard_epsilon(p: float, delta: float) -> float:
    """``delta / (p p')``; equals ``delta / 4`` at ``p = 2``."""
    return delta / (p * conjugate_exponent(p))


def optimize_epsilon(rs: RewritingSystem, S, p: float, delta: float, H: int | None = None, *,
                     ball: BallIndex | None = None, tables: _BoundTables | None = None
                     ) -> tuple[float, BoundReport]:
    """Minimize the cocycle bound over ``eps`` in ``[delta/(4p'), delta]``.

    The log of the bound is convex in ``eps`` (maxima of log-sum-exps of
    linear functions), so golden-section search applies.  The result is
    never worse than the bound at ``standard_epsilon(p, delta)``.
    """
    if not delta > 0:
        raise InputError("growth exponent delta must be > 0")
    if not 1 < p < math.inf:
        raise InputError("p must lie in (1, inf)")
    tables = tables or _BoundTables(rs, S, H, ball)
    pp = conjugate_exponent(p)
    lo, hi = delta / (4 * pp), delta
    f = lambda e: tables.log_bound(p, e)  # noqa: E731
    invphi = (math.sqrt(5) - 1) / 2
    c, d = hi - invphi * (hi - lo), lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(GOLDEN_ITERS):
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
    best = (c, fc) if fc <= fd else (d, fd)
    e0 = standard_epsilon(p, delta)
    f0 = f(e0)
    eps = best[0] if best[1] <= f0 else e0
    return eps, tables.report(p, eps)


def horosphere_counts(rs: RewritingSystem, view: AnnulusView, h) -> dict[int, int]:
    """``j -> |S(n) ∩ H(j)|`` where ``H(j) = {g : beta(g)(h) = j}``.

    Keys run over every ``j`` in ``[-n, n]`` (zeros included).
    """
    h = rs.normal_form(h)
    n = view.n
    if view.theta != 0 or isinstance(view, BallView):
        raise InputError("horosphere counts are defined for spheres")
    ball = view.ball
    idx = view.indices
    if ball.radius >= n + len(h):
        d = ball.distances_from(h, idx)
        beta = len(h) - d
    else:
        beta = np.array([busemann(rs, ball.element(i), h) for i in idx])
    counts = np.bincount(beta + n, minlength=2 * n + 1)
    return {j: int(counts[j + n]) for j in range(-n, n + 1)}


def case_bound(n: int, d: int, delta: float, p: float, eps: float, C_scale: float = 1.0) -> float:
    """Three-regime bound on ``||sum_{g in S} e^{p eps beta(g)}||_inf`` for ``S`` in ``B(n)``.

    ``C (n+1)^d e^{p eps n}`` above ``delta/2``, one extra ``(n+1)`` at
    equality, ``C e^{(delta - p eps) n}`` below.
    """
    if d < 0:
        raise InputError("d must be >= 0")
    t = p * eps
    half = delta / 2
    if t > half:
        return C_scale * (n + 1) ** d * math.exp(t * n)
    if t == half:
        return C_scale * (n + 1) ** (d + 1) * math.exp(t * n)
    return C_scale * math.exp((delta - t) * n)


def poly_exp_sum(N: int, d: int, tau: float) -> float:
    """``sum_{j=0}^{N} (j+1)^d e^{tau j}``."""
    if N < 0 or d < 0:
        raise InputError("need N >= 0 and d >= 0")
    return math.fsum((j + 1) ** d * math.exp(tau * j) for j in range(N + 1))
