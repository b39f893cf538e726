import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cayleynorms import (
    InputError,
    ResourceError,
    best_lower_bound,
    enumerate_ball,
    expansion_exact,
    expansion_lower_bound,
    expansion_report,
    expansion_witnesses,
    free_group,
    product_set,
)

from conftest import LN3, SQRT3_2


def brute_exact(rs, S, ground, max_size):
    """Min of |SX|/|X| over all small X by itertools, with exact fractions."""
    best = None
    for k in range(1, max_size + 1):
        for X in itertools.combinations(ground, k):
            r = Fraction(len({rs.multiply(s, x) for s in S for x in X}), k)
            if best is None or r < best[0]:
                best = (r, list(X))
    return best


# -- product sets --------------------------------------------------------------------

def test_product_set_examples(F2, F2_ball8):
    S1 = F2_ball8.sphere(1)
    assert product_set(F2, S1, [""]) == set(S1.elements())
    assert len(product_set(F2, S1, ["", "a", "A"])) == 11
    X = [F2.normal_form(w) for w in ["ab", "BA", "aaB"]]
    assert product_set(F2, [""], X) == set(X)


@given(st.lists(st.integers(0, 52), min_size=1, max_size=10), st.integers(0, 160))
@settings(max_examples=300)
def test_product_set_bounds_and_translation(xs, gi):
    F2 = free_group(2)
    b = _ball()
    S = b.sphere(1).elements() + b.sphere(2).elements()[:3]
    X = {b.element(i) for i in xs}
    SX = product_set(F2, S, X)
    assert len(X) <= len(SX) <= len(S) * len(X)
    # right translation by g leaves |SX| unchanged
    g = b.element(gi)
    Xg = {F2.multiply(x, g) for x in X}
    assert len(product_set(F2, S, Xg)) == len(SX)


_B = {}


def _ball():
    if not _B:
        _B["b"] = enumerate_ball(free_group(2), 8)
    return _B["b"]


# -- exhaustive search -------------------------------------------------------------------

def test_exact_examples(F2, F2_ball8):
    r, X = expansion_exact(F2, [""], 2, 3)
    assert r == 1.0 and len(X) == 1 and X[0].is_identity
    r, X = expansion_exact(F2, F2_ball8.sphere(1), 1, 1)
    assert r == 4.0 and X[0].is_identity
    r, X = expansion_exact(F2, F2_ball8.sphere(1), F2_ball8.truncate(2), 4)
    assert 3 <= r <= 4
    assert r == 3.25 and [F2.format(x) or "e" for x in X] == ["e", "aa", "ab", "aB"]


@pytest.mark.parametrize("rs_name,n,ground,k", [("F2", 1, 2, 3), ("F2", 2, 1, 4), ("Z2", 1, 2, 4),
                                                ("C23", 1, 3, 3)])
def test_exact_matches_brute_force(request, rs_name, n, ground, k):
    rs = request.getfixturevalue(rs_name)
    b = enumerate_ball(rs, ground + n)
    S = b.sphere(n).elements()
    r, X = expansion_exact(rs, S, ground, k)
    ratio, Xb = brute_exact(rs, S, b.elements[:b.ball_size(ground)], k)
    assert r == float(ratio)
    assert X == Xb                       # same lexicographically-first minimizer
    assert len(product_set(rs, S, X)) / len(X) == r


def test_exact_budget(F2, F2_ball8):
    with pytest.raises(ResourceError, match="witness"):
        expansion_exact(F2, F2_ball8.sphere(1), 4, 4)
    with pytest.raises(ResourceError):
        expansion_exact(F2, F2_ball8.sphere(1), 2, 4, cap=100)
    with pytest.raises(InputError):
        expansion_exact(F2, F2_ball8.sphere(1), 1, 0)
    with pytest.raises(InputError):
        expansion_exact(F2, [], 1, 2)


# -- witnesses ------------------------------------------------------------------------------

def test_witness_ball_products(F2, Z2):
    w = expansion_witnesses(F2, ["a", "A", "b", "B"], ("balls",), max_radius=6)
    ratios = {d: r for d, _, _, r in w.rows}
    assert ratios["ball:2"] == pytest.approx(53 / 17)
    seq = [ratios[f"ball:{m}"] for m in range(7)]
    assert all(x > y for x, y in zip(seq, seq[1:]))
    assert all(r > 3 for r in seq)
    assert seq[-1] - 3 < 0.002
    assert w.best == "ball:6" and w.min_ratio == seq[-1]

    z = expansion_witnesses(Z2, ["a", "A", "b", "B"], ("balls",), max_radius=20)
    zs = [r for _, _, _, r in z.rows]
    assert all(x > y for x, y in zip(zs, zs[1:]))
    assert zs[-1] < 1.1
    # S(1)B(m) = B(m+1) once m >= 1
    for m, (_, nX, nSX, _) in enumerate(z.rows[1:], start=1):
        assert nX == 2 * m * m + 2 * m + 1 and nSX == 2 * (m + 1) ** 2 + 2 * (m + 1) + 1


def test_witness_random_family(F2):
    S = ["a", "A", "b", "B"]
    w1 = expansion_witnesses(F2, S, ("random:20:7",), max_radius=4)
    w2 = expansion_witnesses(F2, S, [("random", 20, 7)], max_radius=4)
    assert w1.rows == w2.rows and len(w1.rows) == 20
    b = enumerate_ball(F2, 5)
    for _, nX, nSX, r in w1.rows:
        assert 1 <= nX <= 161 and 3 <= r <= 4
    assert w1.min_ratio >= 3
    with pytest.raises(InputError):
        expansion_witnesses(F2, S, ("cubes",))
    with pytest.raises(InputError):
        expansion_witnesses(F2, S, ())
    assert b.radius == 5


# -- lower bound ------------------------------------------------------------------------------

def test_lower_bound_examples():
    for p in (1.1, 1.5, 2.0, 3.0):
        assert expansion_lower_bound(4, p, 1.0) == 1.0
    u = (3 ** (1 / 3) + 3 ** (2 / 3)) / 4
    assert expansion_lower_bound(4, 1.5, u) == pytest.approx(u ** -3)
    assert expansion_lower_bound(4, 1.5, 0.880582) == pytest.approx(1.4646, abs=1e-4)
    assert expansion_lower_bound(4, 2.0, SQRT3_2) == pytest.approx(4 / 3)
    with pytest.warns(RuntimeWarning):
        assert expansion_lower_bound(4, 2.0, 1.3) == 1.0
    with pytest.raises(InputError):
        expansion_lower_bound(4, 2.0, 0.0)
    with pytest.raises(InputError):
        expansion_lower_bound(0, 2.0, 0.5)


def test_best_lower_bound(F2, Z2, F2_ball10):
    r = best_lower_bound(F2, F2_ball10.sphere(1), LN3, ball=F2_ball10)
    assert r["provenance"] == "cocycle:exact-tree"
    assert r["lower_bound"] >= 4 / 3
    assert r["p"] in (1.1, 1.25, 1.5, 1.75, 2.0)
    assert r["lower_bound"] == pytest.approx(expansion_lower_bound(4, r["p"], r["norm_upper"]))
    # non-free groups only get the trivial certified bound
    r = best_lower_bound(Z2, ["a", "A", "b", "B"], 0.2)
    assert r["provenance"] == "trivial" and r["lower_bound"] == 1.0


# -- reports and invariants ---------------------------------------------------------------------

def test_certified_interval_nonempty(F2, F2_ball10):
    for n in (1, 2):
        r = expansion_report(F2, F2_ball10.sphere(n), delta=LN3, ball=F2_ball10)
        lo, hi = r.interval
        assert lo <= hi
        assert lo <= r.exact_min <= r.size and lo <= r.witness_min <= r.size
        assert r.exact_min >= 1
        assert hi == min(r.exact_min, r.witness_min)
    r = expansion_report(F2, F2_ball10.sphere(1), delta=LN3, ball=F2_ball10)
    assert r.lower_bound >= 4 / 3 and r.exact_min == 3.25
    assert r.to_dict()["argmin"] == ["e", "aa", "ab", "aB"]


def test_exact_min_bounded_by_small_witnesses(F2, F2_ball10):
    # witnesses inside the exhaustive search space can never beat the exact minimum
    S = F2_ball10.sphere(1)
    exact, _ = expansion_exact(F2, S, 2, 5)
    w = expansion_witnesses(F2, S, ("balls", "spheres"), max_radius=1, ball=F2_ball10)
    assert all(exact <= r for _, nX, _, r in w.rows if nX <= 5)


def test_report_without_exact(F2, F2_ball10):
    r = expansion_report(F2, F2_ball10.sphere(1), delta=None, ground_radius=None, ball=F2_ball10)
    assert r.exact_min is None and r.lower_provenance == "trivial"
    assert r.interval == (1.0, r.witness_min)


def test_c_estimate_floor(F2, F2_ball10):
    for n in (1, 2, 3):
        r = expansion_report(F2, F2_ball10.sphere(n), delta=LN3, ground_radius=None,
                             witness_radius=6, ball=F2_ball10)
        assert r.c_estimate >= 0.2
        assert r.c_estimate == pytest.approx(r.witness_min / (4 * 3 ** (n - 1)))


def test_amenable_c_estimate_decays(Z2):
    b = enumerate_ball(Z2, 31)
    cs = [expansion_witnesses(Z2, b.sphere(1), ("balls",), max_radius=m, ball=b).min_ratio / 4
          for m in (2, 5, 10, 20, 30)]
    assert all(x > y for x, y in zip(cs, cs[1:]))


@given(st.integers(0, 160), st.lists(st.integers(0, 52), min_size=1, max_size=6, unique=True))
@settings(max_examples=200)
def test_ratio_translation_invariant(gi, xs):
    F2 = free_group(2)
    b = _ball()
    S = b.sphere(1).elements()
    g = b.element(gi)
    X = [b.element(i) for i in xs]
    gX = [F2.multiply(x, g) for x in X]
    assert len(product_set(F2, S, X)) == len(product_set(F2, S, gX))
    ratio = len(product_set(F2, S, X)) / len(X)
    assert 3 <= ratio <= 4 or math.isclose(ratio, 4)
    assert np.isfinite(ratio)
