"""Combinatorial expansion ``e(S) = inf |SX| / |X|`` over finite non-empty X.

The infimum is never computed as a point value.  Exhaustive search over
small X and structured witnesses (balls, spheres, random connected sets)
give upper bounds; operator-norm upper bounds give lower bounds through
``e(S) >= ||lambda_S||_{p->p}^(-p')``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .cayley import AnnulusView, BallIndex, enumerate_ball
from .cocycle import _BoundTables, optimize_epsilon
from .errors import InputError, ResourceError
from .group import Element, RewritingSystem
from .operator import conjugate_exponent

__all__ = [
    "product_set",
    "expansion_exact",
    "WitnessReport",
    "expansion_witnesses",
    "expansion_lower_bound",
    "best_lower_bound",
    "ExpansionReport",
    "expansion_report",
    "P_GRID",
    "DEFAULT_SUBSET_CAP",
]

P_GRID = (1.1, 1.25, 1.5, 1.75, 2.0)
DEFAULT_SUBSET_CAP = 1_000_000


def _elements(rs: RewritingSystem, S) -> list[Element]:
    if isinstance(S, AnnulusView):
        return S.elements()
    if isinstance(S, BallIndex):
        return S.elements
    return sorted({rs.normal_form(x) for x in S}, key=lambda g: g.shortlex_key)


def product_set(rs: RewritingSystem, S, X) -> set[Element]:
    """``SX = {s x : s in S, x in X}`` computed with normal forms."""
    Xs = _elements(rs, X)
    return {rs.multiply(s, x) for s in _elements(rs, S) for x in Xs}


def _product_count(ball: BallIndex, S_words, X_idx) -> int:
    imgs = [ball.apply_left(w, X_idx) for w in S_words]
    allv = np.concatenate(imgs)
    if np.any(allv < 0):
        raise InputError("product leaves the enumerated ball")
    return len(np.unique(allv))


def expansion_exact(rs: RewritingSystem, S, ground: BallIndex | int, max_size: int, *,
                    cap: int = DEFAULT_SUBSET_CAP) -> tuple[float, list[Element]]:
    """Minimum of ``|SX|/|X|`` over non-empty ``X`` in the ground ball with
    ``|X| <= max_size``.

    An upper bound on ``e(S)``.  Subsets are visited in lexicographic order
    of their BFS index tuples and the first minimizer is returned.
    """
    if max_size < 1:
        raise InputError("max_size must be >= 1")
    S_el = _elements(rs, S)
    if not S_el:
        raise InputError("S must be non-empty")
    radius = ground if isinstance(ground, int) else ground.radius
    n_g = enumerate_ball(rs, radius).size if isinstance(ground, int) else ground.size
    budget = sum(math.comb(n_g, k) for k in range(1, min(max_size, n_g) + 1))
    if budget > cap:
        raise ResourceError(
            f"{budget} subsets exceed the cap of {cap}; use witness mode instead")
    ns = max(len(s) for s in S_el)
    big = ground if (isinstance(ground, BallIndex) and ground.radius >= radius + ns) \
        else enumerate_ball(rs, radius + ns)
    x = np.arange(n_g)
    masks = [0] * n_g
    for s in S_el:
        img = big.apply_left(s.word, x)
        for i, j in enumerate(img.tolist()):
            masks[i] |= 1 << j

    best_ratio: Fraction | None = None
    best_X: tuple[int, ...] = ()
    stack = [((i,), masks[i]) for i in reversed(range(n_g))]
    # depth-first in lexicographic order: (0,), (0, 1), (0, 1, 2), ...
    while stack:
        combo, m = stack.pop()
        r = Fraction(m.bit_count(), len(combo))
        if best_ratio is None or r < best_ratio:
            best_ratio, best_X = r, combo
        if len(combo) < max_size:
            for j in reversed(range(combo[-1] + 1, n_g)):
                stack.append((combo + (j,), m | masks[j]))
    return float(best_ratio), [big.element(i) for i in best_X]


@dataclass
class WitnessReport:
    min_ratio: float
    best: str
    rows: list = field(default_factory=list)   # (descriptor, |X|, |SX|, ratio)


def _random_connected(ball: BallIndex, size: int, radius: int, rng) -> np.ndarray:
    # grow from the identity through left-multiplication neighbours
    chosen = [0]
    seen = {0}
    frontier = [0]
    ns = ball.left.shape[1]
    while len(chosen) < size and frontier:
        k = int(rng.integers(len(frontier)))
        v = frontier[k]
        s = int(rng.integers(ns))
        w = int(ball.left[v, s])
        if w < 0 or ball.length[w] > radius:
            if all(int(ball.left[v, t]) in seen or int(ball.left[v, t]) < 0
                   or ball.length[int(ball.left[v, t])] > radius for t in range(ns)):
                frontier.pop(k)
            continue
        if w not in seen:
            seen.add(w)
            chosen.append(w)
            frontier.append(w)
    return np.array(sorted(chosen), dtype=np.int64)


def expansion_witnesses(rs: RewritingSystem, S, family: Iterable = ("balls", "spheres"), *,
                        max_radius: int = 6, ball: BallIndex | None = None) -> WitnessReport:
    """Smallest ``|SX|/|X|`` over a structured family of witness sets.

    ``family`` entries: ``"balls"`` (``B(m)``, ``m <= max_radius``),
    ``"spheres"`` (``S(m)``) and ``("random", k, seed)`` for ``k`` random
    connected subsets of ``B(max_radius)`` grown from the identity, sizes
    uniform in ``[1, min(|B(max_radius)|, 256)]``.
    """
    S_el = _elements(rs, S)
    if not S_el:
        raise InputError("S must be non-empty")
    ns = max(len(s) for s in S_el)
    if ball is None or ball.radius < max_radius + ns:
        ball = enumerate_ball(rs, max_radius + ns)
    words = [s.word for s in S_el]
    rows = []
    for fam in family:
        if isinstance(fam, str) and fam in ("balls", "spheres"):
            for m in range(max_radius + 1):
                if fam == "balls":
                    X = np.arange(ball.ball_size(m))
                    desc = f"ball:{m}"
                else:
                    X = np.arange(int(ball.offsets[m]), int(ball.offsets[m + 1]))
                    desc = f"sphere:{m}"
                if len(X) == 0:
                    continue
                c = _product_count(ball, words, X)
                rows.append((desc, len(X), c, c / len(X)))
        else:
            kind, k, seed = _parse_random(fam)
            rng = np.random.default_rng(seed)
            top = min(ball.ball_size(max_radius), 256)
            for i in range(k):
                size = int(rng.integers(1, top + 1))
                X = _random_connected(ball, size, max_radius, rng)
                c = _product_count(ball, words, X)
                rows.append((f"random:{seed}:{i}", len(X), c, c / len(X)))
    if not rows:
        raise InputError("empty witness family")
    best = min(rows, key=lambda r: r[3])
    return WitnessReport(best[3], best[0], rows)


def _parse_random(fam):
    if isinstance(fam, str):
        parts = fam.split(":")
        if parts[0] != "random" or len(parts) != 3:
            raise InputError(f"unknown witness family {fam!r}")
        return "random", int(parts[1]), int(parts[2])
    kind, k, seed = fam
    if kind != "random":
        raise InputError(f"unknown witness family {fam!r}")
    return kind, int(k), int(seed)


def expansion_lower_bound(S_size: int, p: float, norm_upper: float) -> float:
    """``norm_upper^(-p')``, a lower bound on ``e(S)`` when ``norm_upper``
    truly bounds ``||lambda_S||_{p->p}`` from above.

    Values above 1 are clamped to 1 (with a warning): the bound then reads
    ``e(S) >= 1``.
    """
    if S_size < 1:
        raise InputError("S must be non-empty")
    if not norm_upper > 0:
        raise InputError("norm_upper must be positive")
    if norm_upper > 1:
        warnings.warn("norm upper bound exceeds 1; clamped", RuntimeWarning, stacklevel=2)
        norm_upper = 1.0
    return norm_upper ** (-conjugate_exponent(p))


def best_lower_bound(rs: RewritingSystem, S, delta: float, *, p_grid: Sequence[float] = P_GRID,
                     H: int | None = None, ball: BallIndex | None = None) -> dict:
    """Largest cocycle-fed expansion lower bound over ``p_grid``.

    Only proven upper bounds (``exact-tree``) are used; otherwise the
    trivial bound 1 is returned and the empirical candidate is reported
    separately.
    """
    tables = _BoundTables(rs, S, H, ball)
    n = len(tables.elems)
    best = {"lower_bound": 1.0, "p": None, "norm_upper": None, "provenance": "trivial",
            "empirical": None}
    for p in p_grid:
        _, rep = optimize_epsilon(rs, S, p, delta, tables=tables)
        val = expansion_lower_bound(n, p, min(rep.bound, 1.0))
        if rep.exactness == "exact-tree":
            if val > best["lower_bound"]:
                best.update(lower_bound=val, p=p, norm_upper=rep.bound, provenance="cocycle:exact-tree")
        elif best["empirical"] is None or val > best["empirical"]:
            best["empirical"] = val
    return best


@dataclass
class ExpansionReport:
    S: str
    size: int
    exact_min: float | None
    argmin: list | None
    witness_min: float
    witness_best: str
    lower_bound: float
    lower_p: float | None
    lower_provenance: str
    c_estimate: float
    interval: tuple

    def to_dict(self) -> dict:
        return asdict(self)


def expansion_report(rs: RewritingSystem, S, *, delta: float | None, ground_radius: int | None = 2,
                     max_size: int = 4, families: Iterable = ("balls", "spheres"),
                     witness_radius: int = 6, cap: int = DEFAULT_SUBSET_CAP,
                     ball: BallIndex | None = None) -> ExpansionReport:
    """Certified interval ``[lower_bound, min(exact_min, witness_min)]`` for ``e(S)``."""
    S_el = _elements(rs, S)
    desc = S.descriptor if isinstance(S, AnnulusView) else "explicit"
    exact = argmin = None
    if ground_radius is not None:
        exact, X = expansion_exact(rs, S_el, ground_radius, max_size, cap=cap)
        argmin = [rs.format(x) or "e" for x in X]
    wit = expansion_witnesses(rs, S_el, families, max_radius=witness_radius, ball=ball)
    if delta is not None and delta > 0:
        lb = best_lower_bound(rs, S_el, delta, ball=ball)
    else:
        lb = {"lower_bound": 1.0, "p": None, "provenance": "trivial"}
    upper = wit.min_ratio if exact is None else min(exact, wit.min_ratio)
    return ExpansionReport(desc, len(S_el), exact, argmin, wit.min_ratio, wit.best,
                           lb["lower_bound"], lb["p"], lb["provenance"],
                           wit.min_ratio / len(S_el), (lb["lower_bound"], upper))
