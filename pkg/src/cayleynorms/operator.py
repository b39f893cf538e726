"""Left convolution operators on truncated l^p spaces and their norms.

``lambda(a)`` acts by ``(lambda(a) phi)(h) = sum_g a(g) phi(g^-1 h)``.  On
functions supported in ``B(R)`` its image lives in ``B(R + n_a)``, so the
rectangular matrix ``B(R) -> B(R + n_a)`` loses nothing: the norm of the
matrix is a certified lower bound for the operator norm, nondecreasing in R,
and every estimate below is a Rayleigh-type quotient of an explicit witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import curve_fit

from .cayley import AnnulusView, BallIndex, enumerate_ball
from .errors import InputError, NumericalError
from .group import Element, RewritingSystem

__all__ = [
    "SupportedFunction",
    "TruncatedOperator",
    "NormEstimate",
    "conjugate_exponent",
    "star",
    "build_truncated",
    "build_truncated_right",
    "norm2_estimate",
    "normp_estimate",
    "duality_check",
    "averaging_norm",
    "radial_norm_report",
    "richardson_extrapolate",
]


def conjugate_exponent(p: float) -> float:
    if not p > 1:
        raise InputError("exponent must be > 1")
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


@dataclass(frozen=True)
class SupportedFunction:
    """Finitely supported real function on the group.

    Zero coefficients are dropped on construction.
    """

    group: RewritingSystem
    coeffs: Mapping[Element, float]

    def __post_init__(self):
        clean = {}
        for g, c in self.coeffs.items():
            g = self.group.normal_form(g)
            c = float(c) + clean.get(g, 0.0)
            clean[g] = c
        object.__setattr__(self, "coeffs", {g: c for g, c in clean.items() if c != 0.0})

    @classmethod
    def indicator(cls, rs: RewritingSystem, elements: Iterable, weight: float = 1.0) -> SupportedFunction:
        elems = {rs.normal_form(x) for x in elements}
        return cls(rs, {g: weight for g in elems})

    @classmethod
    def radial(cls, ball: BallIndex, coeffs: Sequence[float]) -> SupportedFunction:
        """``sum_k coeffs[k] * 1_{S(k)}``; needs ``len(coeffs) - 1 <= radius``."""
        out = {}
        for k, c in enumerate(coeffs):
            if c == 0:
                continue
            for i in ball.sphere_range(k):
                out[ball.element(i)] = c
        return cls(ball.group, out)

    @property
    def support(self) -> list[Element]:
        return sorted(self.coeffs, key=lambda g: g.shortlex_key)

    @property
    def support_radius(self) -> int:
        return max((len(g) for g in self.coeffs), default=0)

    def __len__(self):
        return len(self.coeffs)

    def l1(self) -> float:
        return math.fsum(abs(c) for c in self.coeffs.values())

    def lp(self, p: float) -> float:
        return math.fsum(abs(c) ** p for c in self.coeffs.values()) ** (1 / p)

    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c in self.coeffs.values())

    def star(self) -> SupportedFunction:
        rs = self.group
        return SupportedFunction(rs, {rs.inverse(g): c for g, c in self.coeffs.items()})

    def convolve(self, other: SupportedFunction) -> SupportedFunction:
        """``(a * b)(g) = sum_x a(x) b(x^-1 g)``."""
        rs = self.group
        out: dict[Element, float] = {}
        for x, cx in self.coeffs.items():
            for y, cy in other.coeffs.items():
                g = rs.multiply(x, y)
                out[g] = out.get(g, 0.0) + cx * cy
        return SupportedFunction(rs, out)

    def scaled(self, c: float) -> SupportedFunction:
        return SupportedFunction(self.group, {g: c * v for g, v in self.coeffs.items()})


def star(a: SupportedFunction) -> SupportedFunction:
    """``a*(g) = a(g^-1)`` (real coefficients)."""
    return a.star()


@dataclass(eq=False)
class TruncatedOperator:
    """Sparse matrix of ``lambda(a)`` from ``B(R)`` to ``B(R + n_a)``.

    Both balls are prefixes of ``ball``, so domain and codomain index 0 is the
    identity.
    """

    matrix: sp.csr_matrix
    ball: BallIndex
    R: int
    support_radius: int
    scale: float = 1.0
    _T: sp.csr_matrix | None = field(default=None, repr=False)

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def T(self) -> sp.csr_matrix:
        if self._T is None:
            self._T = self.matrix.T.tocsr()
        return self._T

    def column_abs_sums(self) -> np.ndarray:
        return np.asarray(abs(self.matrix).sum(axis=0)).ravel()

    def __matmul__(self, x):
        return self.matrix @ x


def _ball_for(rs: RewritingSystem, radius: int, ball: BallIndex | None) -> BallIndex:
    if ball is not None and ball.radius >= radius:
        return ball
    return enumerate_ball(rs, radius)


def build_truncated(rs: RewritingSystem, a: SupportedFunction, R: int, *,
                    ball: BallIndex | None = None) -> TruncatedOperator:
    """Matrix ``M[h, x] = sum_{g: g x = h} a(g)`` for ``x`` in ``B(R)``.

    ``ball`` may be any enumerated ball of radius at least ``R + n_a``; one
    is enumerated otherwise.
    """
    if R < 0:
        raise InputError("R must be >= 0")
    na = a.support_radius
    ball = _ball_for(rs, R + na, ball)
    n_dom = ball.ball_size(R)
    n_cod = ball.ball_size(R + na)
    x = np.arange(n_dom)
    rows, vals = [], []
    for g, c in a.coeffs.items():
        rows.append(ball.apply_left(g.word, x))
        vals.append(np.full(n_dom, c))
    if not rows:
        M = sp.csr_matrix((n_cod, n_dom))
    else:
        r = np.concatenate(rows)
        M = sp.csr_matrix((np.concatenate(vals), (r, np.tile(x, len(rows)))), shape=(n_cod, n_dom))
        M.sum_duplicates()
    return TruncatedOperator(M, ball, R, na)


def build_truncated_right(rs: RewritingSystem, a: SupportedFunction, R: int, *,
                          ball: BallIndex | None = None) -> TruncatedOperator:
    """Same truncation for the right action ``(rho(a) phi)(h) = sum_g a(g) phi(h g)``."""
    na = a.support_radius
    ball = _ball_for(rs, R + na, ball)
    n_dom = ball.ball_size(R)
    n_cod = ball.ball_size(R + na)
    x = np.arange(n_dom)
    rows, vals = [], []
    for g, c in a.coeffs.items():
        rows.append(ball.apply_right(x, rs.inverse(g).word))
        vals.append(np.full(n_dom, c))
    r = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    v = np.concatenate(vals) if vals else np.zeros(0)
    M = sp.csr_matrix((v, (r, np.tile(x, len(rows)))), shape=(n_cod, n_dom))
    M.sum_duplicates()
    return TruncatedOperator(M, ball, R, na)


@dataclass
class NormEstimate:
    value: float
    p: float
    witness: np.ndarray = field(repr=False)
    iterations: int
    converged: bool
    restart: str = ""

    @property
    def witness_norm(self) -> float:
        return float(_lp(self.witness, self.p))

    def scaled(self, c: float) -> NormEstimate:
        return NormEstimate(self.value * c, self.p, self.witness, self.iterations,
                            self.converged, self.restart)


def _lp(x: np.ndarray, p: float) -> float:
    m = np.max(np.abs(x)) if x.size else 0.0
    if m == 0 or not np.isfinite(m):
        return float(m)
    if p == 2:
        return float(np.linalg.norm(x))
    return float(m * np.sum((np.abs(x) / m) ** p) ** (1 / p))


def _as_pair(M):
    if isinstance(M, TruncatedOperator):
        return M.matrix, M.T
    if sp.issparse(M):
        M = M.tocsr()
        return M, M.T.tocsr()
    M = np.asarray(M, dtype=float)
    return M, M.T


def norm2_estimate(M, tol: float = 1e-8, max_iters: int = 5000, x0=None) -> NormEstimate:
    """Largest singular value by power iteration on ``M^T M``.

    Starts from the normalized all-ones vector.  The returned value is
    ``||M x|| / ||x||`` for the final iterate ``x``, hence never above the
    true norm.
    """
    A, AT = _as_pair(M)
    n = A.shape[1]
    if n == 0:
        raise InputError("empty domain")
    x = np.ones(n) if x0 is None else np.asarray(x0, dtype=float).copy()
    x /= np.linalg.norm(x)
    prev = 0.0
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        y = A @ x
        v = float(np.linalg.norm(y))
        if not math.isfinite(v):
            raise NumericalError("non-finite value in power iteration")
        if v == 0.0:
            raise InputError("matrix annihilates the start vector")
        if abs(v - prev) < tol * v:
            converged = True
            break
        prev = v
        z = AT @ y
        x = z / np.linalg.norm(z)
    value = float(np.linalg.norm(A @ x) / np.linalg.norm(x))
    return NormEstimate(value, 2.0, x, it, converged, "uniform")


def _psi(t: np.ndarray, q: float) -> np.ndarray:
    # |t|^(q-1) sign(t), scaled by max|t| first; the iteration is homogeneous
    m = np.max(np.abs(t))
    if m == 0:
        return t
    u = t / m
    if q == 2:
        return u
    return np.sign(u) * np.abs(u) ** (q - 1)


def _boyd(A, AT, p: float, x: np.ndarray, tol: float, max_iters: int):
    pp = conjugate_exponent(p)
    x = x / _lp(x, p)
    prev = 0.0
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        y = A @ x
        v = _lp(y, p)
        if not math.isfinite(v):
            raise NumericalError("non-finite value in Boyd iteration")
        if v == 0.0:
            return None
        if abs(v - prev) < tol * v:
            converged = True
            break
        prev = v
        z = AT @ _psi(y, p)
        if not np.all(np.isfinite(z)):
            raise NumericalError("non-finite value in Boyd iteration")
        x = _psi(z, pp)
        x /= _lp(x, p)
    value = _lp(A @ x, p) / _lp(x, p)
    return value, x, it, converged


def normp_estimate(M, p: float, tol: float = 1e-8, max_iters: int = 5000, restarts: int = 3,
                   seed: int = 42) -> NormEstimate:
    """Lower estimate of ``||M||_{p->p}`` by Boyd's nonlinear power method.

    The iteration is ``x <- psi_{p'}(M^T psi_p(M x))`` normalized in l^p,
    with ``psi_q(t) = |t|^(q-1) sign(t)``.  Starts, in order: the uniform
    vector, the indicator of the first domain index (the identity for
    truncated operators), then seeded random positive vectors; the best
    witness wins.  ``M`` must be entrywise nonnegative.
    """
    if not 1 < p < math.inf:
        raise InputError("p must lie in (1, inf)")
    A, AT = _as_pair(M)
    data = A.data if sp.issparse(A) else A
    if np.any(data < 0):
        raise InputError("normp_estimate needs an entrywise nonnegative matrix")
    n = A.shape[1]
    rng = np.random.default_rng(seed)
    starts = []
    for k in range(max(restarts, 1)):
        if k == 0:
            starts.append(("uniform", np.ones(n)))
        elif k == 1:
            e = np.zeros(n)
            e[0] = 1.0
            starts.append(("delta_e", e))
        else:
            starts.append((f"random{k - 2}", rng.uniform(0.5, 1.5, size=n)))
    best = None
    for name, x0 in starts:
        out = _boyd(A, AT, p, x0, tol, max_iters)
        if out is None:
            continue
        value, x, it, conv = out
        if best is None or value > best.value:
            best = NormEstimate(float(value), float(p), x, it, conv, name)
    if best is None:
        raise InputError("matrix annihilates every start vector")
    return best


def duality_check(rs: RewritingSystem, a: SupportedFunction, p: float, R: int, *,
                  tol: float = 1e-11, max_iters: int = 20000, ball: BallIndex | None = None) -> dict:
    """Compare ``||M||_{p->p}`` with ``||M^T||_{p'->p'}`` for the truncation of ``lambda(a)``.

    ``M^T`` is the truncation of ``lambda(a*)`` with domain and codomain
    swapped, and the two norms agree exactly for any matrix.
    """
    T = build_truncated(rs, a, R, ball=ball)
    lhs = normp_estimate(T, p, tol=tol, max_iters=max_iters)
    rhs = normp_estimate(T.T, conjugate_exponent(p), tol=tol, max_iters=max_iters)
    return {"lhs": lhs.value, "rhs": rhs.value, "gap": abs(lhs.value - rhs.value),
            "converged": lhs.converged and rhs.converged}


def _set_elements(rs: RewritingSystem, view) -> list[Element]:
    if isinstance(view, AnnulusView):
        return view.elements()
    if isinstance(view, BallIndex):
        return view.elements
    return [rs.normal_form(x) for x in view]


def averaging_norm(rs: RewritingSystem, view, p: float, R: int, *, tol: float = 1e-8,
                   max_iters: int = 5000, restarts: int = 3, seed: int = 42,
                   ball: BallIndex | None = None) -> NormEstimate:
    """Lower estimate of ``||lambda_S||_{p->p}`` for a sphere, annulus, ball
    or explicit element list ``S``.

    At least the uniform and identity starts are always run, so the result
    is at least ``|S|^(-1/p')`` up to rounding.
    """
    elems = _set_elements(rs, view)
    if not elems:
        raise InputError("averaging set is empty")
    a = SupportedFunction.indicator(rs, elems)
    T = build_truncated(rs, a, R, ball=ball)
    est = normp_estimate(T, p, tol=tol, max_iters=max_iters, restarts=max(restarts, 2), seed=seed)
    return est.scaled(1.0 / len(a))


def radial_norm_report(rs: RewritingSystem, coeffs: Sequence[float], p: float, R: int, *,
                       d: int = 0, tol: float = 1e-8, max_iters: int = 5000,
                       ball: BallIndex | None = None) -> dict:
    """Estimate ``||lambda(a)||_{p->p}`` for ``a = sum_k coeffs[k] 1_{S(k)}``
    and compare it with the radial bound ``(n+1)^e ||a||_p``.

    ``n = len(coeffs) - 1``; the exponent is ``e = (d+1)/p'`` for ``p < 2``
    and ``e = d + 3/2`` at ``p = 2``, where ``d`` is the polynomial degree of
    rough-segment counts (0 for hyperbolic groups).
    """
    coeffs = [float(c) for c in coeffs]
    if any(c < 0 for c in coeffs):
        raise InputError("radial coefficients must be nonnegative")
    if not 1 < p <= 2:
        raise InputError("p must lie in (1, 2]")
    n = len(coeffs) - 1
    ball = _ball_for(rs, R + n, ball)
    a = SupportedFunction.radial(ball, coeffs)
    sizes = ball.sphere_sizes
    a_p = math.fsum(c ** p * float(sizes[k]) for k, c in enumerate(coeffs)) ** (1 / p)
    est = normp_estimate(build_truncated(rs, a, R, ball=ball), p, tol=tol, max_iters=max_iters)
    e = d + 1.5 if p == 2 else (d + 1) / conjugate_exponent(p)
    rhs = (n + 1) ** e * a_p
    return {"estimate": est.value, "a_p": a_p, "exponent": e, "bound_rhs": rhs,
            "ratio": est.value / rhs, "n": n, "p": p, "R": R, "converged": est.converged}


def richardson_extrapolate(Rs: Sequence[float], values: Sequence[float], model: str = "shifted") -> dict:
    """Extrapolate truncated estimates to ``R -> infinity``.

    ``model="quadratic"`` fits ``L - c/R^2`` by least squares.  The default
    ``"shifted"`` fits ``L - c/(R+s)^2``: truncated radial operators behave
    like path graphs whose effective length is ``R`` plus a constant offset,
    and the plain quadratic model is visibly biased at desk-scale radii.
    Needs at least four radii for the shifted model.
    """
    R = np.asarray(Rs, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(R) < 2 or len(R) != len(v):
        raise InputError("need matching radii and values, at least two")
    A = np.column_stack([np.ones_like(R), -1.0 / R ** 2])
    (L, c), *_ = np.linalg.lstsq(A, v, rcond=None)
    if model == "quadratic":
        return {"L": float(L), "c": float(c), "s": 0.0, "model": model}
    if model != "shifted":
        raise InputError(f"unknown extrapolation model {model!r}")
    if len(R) < 4:
        raise InputError("shifted model needs at least four radii")

    def f(r, L, c, s):
        return L - c / (r + s) ** 2

    lo = -float(R.min()) + 0.5
    (L2, c2, s2), _ = curve_fit(f, R, v, p0=[v[np.argmax(R)], max(c, 1e-3), 2.0],
                                bounds=([-np.inf, -np.inf, lo], [np.inf, np.inf, 100.0]),
                                maxfev=20000)
    return {"L": float(L2), "c": float(c2), "s": float(s2), "model": model}
