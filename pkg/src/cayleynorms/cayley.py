"""Balls, spheres and annuli in Cayley graphs, and metric queries on them.

A :class:`BallIndex` numbers the elements of ``B(R)`` in BFS order with
shortlex tie-breaking, so ``B(r)`` is always the prefix ``[0, |B(r)|)`` and
every sphere is a contiguous block.  Group multiplication inside the ball is
precomputed as two integer tables (``right[i, s]`` and ``left[i, s]``, with
-1 for products that leave the ball), which is what makes the operator and
cocycle code vectorizable.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import InputError, ResourceError
from .group import Element, RewritingSystem

__all__ = [
    "BallIndex",
    "SphereView",
    "AnnulusView",
    "BallView",
    "GrowthStats",
    "MedianResult",
    "BoundaryWarning",
    "DEFAULT_MAX_ELEMENTS",
    "enumerate_ball",
    "ball_size_bound",
    "distance",
    "rough_median",
    "rough_segment_count",
    "growth_stats",
]

DEFAULT_MAX_ELEMENTS = 20_000_000


class BoundaryWarning(UserWarning):
    """The enumerated ball may be too small for an exact answer."""


@dataclass(eq=False)
class BallIndex:
    group: RewritingSystem
    radius: int
    length: np.ndarray          # (N,) word length of each element
    parent: np.ndarray          # (N,) index of the word with its last letter removed
    last: np.ndarray            # (N,) last letter, -1 for the identity
    right: np.ndarray           # (N, n_symbols) index of x*s or -1
    left: np.ndarray            # (N, n_symbols) index of s*x or -1
    offsets: np.ndarray         # (R+2,) sphere n occupies [offsets[n], offsets[n+1])

    def __len__(self):
        return int(self.offsets[-1])

    @property
    def size(self) -> int:
        return len(self)

    @property
    def sphere_sizes(self) -> np.ndarray:
        return np.diff(self.offsets)

    def ball_size(self, n: int) -> int:
        if not 0 <= n <= self.radius:
            raise InputError(f"radius {n} outside enumerated ball of radius {self.radius}")
        return int(self.offsets[n + 1])

    def sphere_range(self, n: int) -> range:
        if not 0 <= n <= self.radius:
            raise InputError(f"sphere {n} outside enumerated ball of radius {self.radius}")
        return range(int(self.offsets[n]), int(self.offsets[n + 1]))

    # -- elements ------------------------------------------------------------

    def word(self, i: int) -> tuple[int, ...]:
        out = []
        i = int(i)
        while i != 0:
            out.append(int(self.last[i]))
            i = int(self.parent[i])
        return tuple(reversed(out))

    def element(self, i: int) -> Element:
        return Element(self.word(i))

    @cached_property
    def elements(self) -> list[Element]:
        """All elements in BFS order (materialized on first access)."""
        words: list[tuple[int, ...]] = [()]
        for i in range(1, len(self)):
            words.append(words[self.parent[i]] + (int(self.last[i]),))
        return [Element(w) for w in words]

    def index_of(self, x) -> int:
        """BFS index of ``x``; raises KeyError when it lies outside the ball."""
        word = self.group.reduce_word(x)
        i = 0
        for s in word:
            i = int(self.right[i, s])
            if i < 0:
                raise KeyError(self.group.format(word))
        return i

    def __contains__(self, x) -> bool:
        try:
            self.index_of(x)
        except KeyError:
            return False
        return True

    def indices_of(self, xs) -> np.ndarray:
        return np.array([self.index_of(x) for x in xs], dtype=np.int64)

    # -- multiplication ------------------------------------------------------

    def apply_left(self, word: Sequence[int], idx) -> np.ndarray:
        """Indices of ``g*x`` for ``g`` spelled by ``word``, -1 when outside.

        Exact whenever ``|x| + len(word) <= radius`` (then no intermediate
        product can leave the ball).
        """
        out = np.asarray(idx, dtype=np.int64)
        for s in reversed(tuple(word)):
            col = self.left[:, s]
            out = np.where(out >= 0, col[np.maximum(out, 0)], -1)
        return out

    def apply_right(self, idx, word: Sequence[int]) -> np.ndarray:
        out = np.asarray(idx, dtype=np.int64)
        for s in word:
            col = self.right[:, s]
            out = np.where(out >= 0, col[np.maximum(out, 0)], -1)
        return out

    @cached_property
    def inverse_index(self) -> np.ndarray:
        """Permutation ``i -> index(x_i^-1)`` (word length is preserved)."""
        inv_sym = np.asarray(self.group.inverse_symbol)
        inv = np.zeros(len(self), dtype=np.int64)
        for n in range(1, self.radius + 1):
            sl = slice(int(self.offsets[n]), int(self.offsets[n + 1]))
            # (p s)^-1 = s^-1 p^-1
            inv[sl] = self.left[inv[self.parent[sl]], inv_sym[self.last[sl]]]
        return inv

    def distances_from(self, x, idx=None) -> np.ndarray:
        """Word distance from ``x`` to each ball element in ``idx``.

        Entries are -1 where the answer needs elements beyond the ball.
        """
        if idx is None:
            idx = np.arange(len(self))
        xinv = self.group.inverse(x)
        j = self.apply_left(xinv.word, idx)
        return np.where(j >= 0, self.length[np.maximum(j, 0)], -1)

    # -- views ---------------------------------------------------------------

    def sphere(self, n: int) -> SphereView:
        return SphereView(self, n)

    def annulus(self, n: int, theta: int) -> AnnulusView:
        return AnnulusView(self, n, theta)

    def ball_view(self, r: int) -> BallView:
        return BallView(self, r)

    def truncate(self, r: int) -> BallIndex:
        """The ball of radius ``r <= radius``, sharing storage where possible."""
        if r == self.radius:
            return self
        if not 0 <= r < self.radius:
            raise InputError("truncation radius out of range")
        n = int(self.offsets[r + 1])
        right = self.right[:n].copy()
        right[right >= n] = -1
        left = self.left[:n].copy()
        left[left >= n] = -1
        return BallIndex(self.group, r, self.length[:n], self.parent[:n], self.last[:n],
                         right, left, self.offsets[:r + 2])


@dataclass(eq=False)
class AnnulusView:
    """Elements with ``n - theta <= |g| <= n + theta``; a sphere when theta = 0."""

    ball: BallIndex
    n: int
    theta: int = 0

    def __post_init__(self):
        if self.theta < 0 or self.n < 0:
            raise InputError("annulus needs n >= 0 and theta >= 0")
        if self.n + self.theta > self.ball.radius:
            raise InputError("annulus exceeds the enumerated ball")

    @property
    def indices(self) -> np.ndarray:
        lo = max(self.n - self.theta, 0)
        return np.arange(int(self.ball.offsets[lo]), int(self.ball.offsets[self.n + self.theta + 1]))

    def __len__(self):
        return len(self.indices)

    @property
    def size(self) -> int:
        return len(self)

    def elements(self) -> list[Element]:
        return [self.ball.element(i) for i in self.indices]

    @property
    def outer(self) -> int:
        """Largest word length in the view."""
        return self.n + self.theta

    @property
    def descriptor(self) -> str:
        return f"annulus:{self.n}:{self.theta}"


class SphereView(AnnulusView):
    def __init__(self, ball: BallIndex, n: int):
        super().__init__(ball, n, 0)

    @property
    def descriptor(self) -> str:
        return f"sphere:{self.n}"


class BallView(AnnulusView):
    """All of ``B(n)`` seen as a set."""

    def __init__(self, ball: BallIndex, n: int):
        super().__init__(ball, n, 0)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(int(self.ball.offsets[self.n + 1]))

    @property
    def descriptor(self) -> str:
        return f"ball:{self.n}"


def ball_size_bound(rs: RewritingSystem, R: int) -> int:
    """Upper bound on |B(R)| from the free group on the same alphabet."""
    s = rs.n_symbols
    if s <= 1:
        return R + 1
    if s == 2:
        return 2 * R + 1
    q = s - 1
    return 1 + s * (q ** R - 1) // (q - 1)


# -- enumeration ---------------------------------------------------------------


def enumerate_ball(rs: RewritingSystem, R: int, *, max_elements: int = DEFAULT_MAX_ELEMENTS,
                   generic: bool = False) -> BallIndex:
    """Enumerate ``B(R)`` by breadth-first search over right multiplication.

    Free groups use a closed-form enumeration of reduced words (identical
    output, much faster); pass ``generic=True`` to force the general BFS.

    Raises
    ------
    ResourceError
        If more than ``max_elements`` elements would be needed; the error
        carries the largest radius that fit.
    """
    if R < 0:
        raise InputError("radius must be >= 0")
    if rs.is_free and not generic:
        return _enumerate_free(rs, R, max_elements)
    return _enumerate_generic(rs, R, max_elements)


def _enumerate_generic(rs: RewritingSystem, R: int, max_elements: int) -> BallIndex:
    ns = rs.n_symbols
    words: list[tuple[int, ...]] = [()]
    index = {(): 0}
    offsets = [0, 1]
    for n in range(1, R + 1):
        cand = set()
        for i in range(offsets[n - 1], offsets[n]):
            w = words[i]
            for s in range(ns):
                v = rs.append(w, s)
                if len(v) == n:
                    cand.add(v)
        new = sorted(cand)
        if len(words) + len(new) > max_elements:
            raise ResourceError(
                f"|B({n})| exceeds the budget of {max_elements} elements", completed_radius=n - 1)
        for v in new:
            index[v] = len(words)
            words.append(v)
        offsets.append(len(words))
    N = len(words)
    right = np.full((N, ns), -1, dtype=np.int32)
    inv = np.zeros(N, dtype=np.int64)
    parent = np.zeros(N, dtype=np.int32)
    last = np.full(N, -1, dtype=np.int16)
    length = np.zeros(N, dtype=np.int16)
    inv_sym = rs.inverse_symbol
    for i, w in enumerate(words):
        length[i] = len(w)
        if w:
            parent[i] = index[w[:-1]]
            last[i] = w[-1]
        for s in range(ns):
            right[i, s] = index.get(rs.append(w, s), -1)
        inv[i] = index[rs.reduce_word(tuple(inv_sym[s] for s in reversed(w)))]
    # s*x = (x^-1 s^-1)^-1
    inv_cols = np.asarray(inv_sym)
    r = right[inv][:, inv_cols]
    left = np.where(r >= 0, inv[np.maximum(r, 0)], -1).astype(np.int32)
    return BallIndex(rs, R, length, parent, last, right, left, np.asarray(offsets, dtype=np.int64))


def _enumerate_free(rs: RewritingSystem, R: int, max_elements: int) -> BallIndex:
    # Symbols are ordered a, A, b, B, ... so the inverse of t is t ^ 1.
    ns = rs.n_symbols
    q = ns - 1
    sizes = [1] + [ns * q ** (n - 1) for n in range(1, R + 1)]
    total = 0
    for n, s in enumerate(sizes):
        total += s
        if total > max_elements:
            raise ResourceError(
                f"|B({n})| = {total} exceeds the budget of {max_elements} elements",
                completed_radius=n - 1)
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    N = int(offsets[-1])
    inv_sym = np.arange(ns) ^ 1

    length = np.zeros(N, dtype=np.int16)
    parent = np.zeros(N, dtype=np.int32)
    last = np.full(N, -1, dtype=np.int16)
    first = np.full(N, -1, dtype=np.int16)
    second = np.full(N, -1, dtype=np.int16)
    rank = np.zeros(N, dtype=np.int64)
    letters = np.arange(ns)

    def digit(t, prev):
        # position of letter t among the q letters allowed after prev
        return t - (t > inv_sym[prev])

    if R >= 1:
        sl = slice(1, 1 + ns)
        length[sl] = 1
        last[sl] = letters
        first[sl] = letters
        rank[sl] = letters
    for n in range(2, R + 1):
        p = np.arange(offsets[n - 1], offsets[n])
        L = last[p].astype(np.int64)
        mask = letters[None, :] != inv_sym[L][:, None]
        rows, t = np.nonzero(mask)
        child = slice(int(offsets[n]), int(offsets[n + 1]))
        pp = p[rows]
        length[child] = n
        parent[child] = pp
        last[child] = t
        first[child] = first[pp]
        second[child] = t if n == 2 else second[pp]
        rank[child] = rank[pp] * q + digit(t, L[rows])

    right = np.full((N, ns), -1, dtype=np.int32)
    left = np.full((N, ns), -1, dtype=np.int32)
    if R >= 1:
        right[0] = 1 + letters
        left[0] = 1 + letters
    for m in range(1, R + 1):
        idx = np.arange(offsets[m], offsets[m + 1])
        lst = last[idx].astype(np.int64)
        f = first[idx].astype(np.int64)
        r = rank[idx]
        for t in range(ns):
            back = lst == (t ^ 1)
            col = np.full(len(idx), -1, dtype=np.int64)
            col[back] = parent[idx[back]]
            if m + 1 <= R:
                fwd = ~back
                col[fwd] = offsets[m + 1] + r[fwd] * q + digit(t, lst[fwd])
            right[idx, t] = col

            cancel = f == (t ^ 1)
            col = np.full(len(idx), -1, dtype=np.int64)
            if m == 1:
                col[cancel] = 0
            else:
                w1 = second[idx[cancel]].astype(np.int64)
                fc = f[cancel]
                col[cancel] = offsets[m - 1] + (r[cancel] - fc * q ** (m - 1)
                                                - digit(w1, fc) * q ** (m - 2) + w1 * q ** (m - 2))
            if m + 1 <= R:
                grow = ~cancel
                fg = f[grow]
                col[grow] = offsets[m + 1] + (t * q ** m + digit(fg, np.full_like(fg, t)) * q ** (m - 1)
                                              + r[grow] - fg * q ** (m - 1))
            left[idx, t] = col
    return BallIndex(rs, R, length, parent, last, right, left, offsets)


# -- metric queries --------------------------------------------------------------


def distance(rs: RewritingSystem, x, y) -> int:
    """Word distance ``|x^-1 y|``."""
    return rs.length(rs.multiply(rs.inverse(x), y))


@dataclass(frozen=True)
class MedianResult:
    median: Element
    rho_achieved: int
    within_rho: bool
    boundary_warning: bool = False


def _common_prefix(u: tuple[int, ...], v: tuple[int, ...]) -> tuple[int, ...]:
    k = 0
    for a, b in zip(u, v):
        if a != b:
            break
        k += 1
    return u[:k]


def rough_median(ball: BallIndex, x, y, z, rho: int = 0, *, exhaustive: bool = False) -> MedianResult:
    """Point minimizing the largest defect ``d(u,m) + d(m,v) - d(u,v)``
    over the three pairs of ``x, y, z``.

    The search scans every element of the ball whose distances to the three
    points are exactly known; ties go to the smallest BFS index.  In free
    groups the tree median ``x * lcp(x^-1 y, x^-1 z)`` is returned directly
    unless ``exhaustive`` is set.
    """
    rs = ball.group
    x, y, z = (rs.normal_form(w) for w in (x, y, z))
    if rs.is_free and not exhaustive:
        xi = rs.inverse(x)
        u = rs.multiply(xi, y).word
        v = rs.multiply(xi, z).word
        m = rs.multiply(x, Element(_common_prefix(u, v)))
        return MedianResult(m, 0, True, False)

    pts = (x, y, z)
    reach = max(len(p) for p in pts)
    Rc = ball.radius - reach
    if Rc < 0:
        raise InputError("points lie too far out for the enumerated ball")
    cand = np.arange(ball.ball_size(Rc))
    d = [ball.distances_from(p, cand) for p in pts]
    pair = {(a, b): distance(rs, pts[a], pts[b]) for a, b in ((0, 1), (1, 2), (2, 0))}
    defect = np.zeros(len(cand), dtype=np.int64)
    for (a, b), dab in pair.items():
        defect = np.maximum(defect, d[a] + d[b] - dab)
    best = int(np.argmin(defect))
    rho_a = int(defect[best])
    # a strictly better median m has |m| <= |u| + d(u,v) + rho_a - 1 for every pair
    needed = min(len(pts[a]) + dab for (a, _), dab in pair.items()) + rho_a - 1
    boundary = Rc < needed
    if boundary:
        warnings.warn("rough_median: candidates exhaust the ball; result may not be optimal",
                      BoundaryWarning, stacklevel=2)
    return MedianResult(ball.element(int(cand[best])), rho_a, rho_a <= rho, boundary)


def rough_segment_count(ball: BallIndex, x, y, rho: int, n: int) -> int:
    """Number of ``z`` with ``d(x,z) = n`` in the rough segment ``[x,y]_rho``.

    Writing ``z = x w`` with ``|w| = n`` and ``u = x^-1 y``, the count is the
    number of ``w`` in ``S(n)`` with ``d(w, u) <= |u| + rho - n``.  Exact when
    the ball radius is at least ``n + |u|``; otherwise a
    :class:`BoundaryWarning` is issued and far candidates are dropped.
    """
    rs = ball.group
    u = rs.multiply(rs.inverse(x), y)
    du = len(u)
    if n < 0 or n > du + rho:
        raise InputError("need 0 <= n <= d(x, y) + rho")
    if n > ball.radius:
        raise InputError("sphere of radius n is not enumerated")
    if ball.radius < n + du:
        warnings.warn("rough_segment_count: ball too small to contain all candidates",
                      BoundaryWarning, stacklevel=2)
    w = np.arange(int(ball.offsets[n]), int(ball.offsets[n + 1]))
    dist = ball.distances_from(u, w)
    ok = (dist >= 0) & (dist <= du + rho - n)
    return int(np.count_nonzero(ok))


# -- growth ----------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthStats:
    sphere_sizes: np.ndarray
    delta_hat: float
    pure_growth_ratios: np.ndarray
    fit_window: tuple[int, int]
    label: str = "exponential"
    residuals: dict = field(default_factory=dict)

    @property
    def exponential(self) -> bool:
        return self.label == "exponential"


NON_EXPONENTIAL_SLOPE = 0.2


def growth_stats(ball: BallIndex, fit_window: tuple[int, int] | None = None) -> GrowthStats:
    """Least-squares growth exponent of ``ln |S(n)|`` over ``fit_window``.

    The window is inclusive and must lie in ``[1, R]`` with at least three
    points.  The growth is labelled ``"non-exponential"`` when the slope is
    below 0.2 or when a power law ``|S(n)| ~ n^a`` fits the window at least
    as well as an exponential.
    """
    R = ball.radius
    lo, hi = fit_window if fit_window is not None else (1, R)
    if lo < 1 or hi > R or hi - lo + 1 < 3:
        raise InputError("fit window must lie in [1, R] and contain at least 3 radii")
    sizes = ball.sphere_sizes.astype(np.int64)
    n = np.arange(lo, hi + 1, dtype=float)
    s = sizes[lo:hi + 1].astype(float)
    if np.any(s == 0):
        raise InputError("degenerate growth: empty sphere inside the fit window")
    y = np.log(s)
    A = np.column_stack([n, np.ones_like(n)])
    (slope, icpt), res_exp, *_ = np.linalg.lstsq(A, y, rcond=None)
    B = np.column_stack([np.log(n), np.ones_like(n)])
    _, res_pow, *_ = np.linalg.lstsq(B, y, rcond=None)
    r_exp = float(res_exp[0]) if len(res_exp) else 0.0
    r_pow = float(res_pow[0]) if len(res_pow) else 0.0
    nonexp = slope < NON_EXPONENTIAL_SLOPE or r_pow <= r_exp
    all_n = np.arange(len(sizes), dtype=float)
    ratios = sizes * np.exp(-slope * all_n)
    return GrowthStats(sizes, float(slope), ratios, (lo, hi),
                       "non-exponential" if nonexp else "exponential",
                       {"exponential": r_exp, "power": r_pow})
