"""Groups given by symmetric alphabets and shortlex rewriting systems.

Words are tuples of symbol indices.  The order of the alphabet is the
shortlex order, and every rule must strictly decrease a word in that order,
which makes rewriting terminate.  Free cancellation (``s s^-1 -> ""``) is
always part of the system and never needs to be listed.

Three presets are provided, all confluent, so normal forms are the
shortlex-least spellings and their length is the word length:

>>> F = free_group(2)
>>> F.format(F.normal_form("abB"))
'a'
>>> Z2 = free_abelian(2)
>>> Z2.format(Z2.normal_form("ba"))
'ab'
"""

from __future__ import annotations

import functools
import json
import string
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

from .errors import InputError

__all__ = [
    "GeneratorAlphabet",
    "Element",
    "RewritingSystem",
    "ConfluenceReport",
    "normal_form",
    "multiply",
    "inverse",
    "check_local_confluence",
    "free_group",
    "free_abelian",
    "free_product",
    "group_from_spec",
    "load_group",
]


@dataclass(frozen=True)
class GeneratorAlphabet:
    """Ordered symbols with an inverse pairing.

    ``inverse[i]`` is the index of the inverse of ``symbols[i]``; a symbol
    may be its own inverse (an involution generator).
    """

    symbols: tuple[str, ...]
    inverse: tuple[int, ...]

    def __post_init__(self):
        n = len(self.symbols)
        if len(set(self.symbols)) != n:
            raise InputError("duplicate generator symbols")
        if len(self.inverse) != n:
            raise InputError("inverse pairing must cover every symbol")
        for i, j in enumerate(self.inverse):
            if not 0 <= j < n or self.inverse[j] != i:
                raise InputError(f"inverse pairing is not an involution at {self.symbols[i]!r}")

    @classmethod
    def from_pairs(cls, symbols: Sequence[str], inverses: Sequence[str]) -> GeneratorAlphabet:
        pos = {s: i for i, s in enumerate(symbols)}
        try:
            inv = tuple(pos[t] for t in inverses)
        except KeyError as exc:
            raise InputError(f"inverse symbol {exc.args[0]!r} is not in the alphabet") from None
        return cls(tuple(symbols), inv)

    def __len__(self):
        return len(self.symbols)

    @property
    def single_char(self) -> bool:
        return all(len(s) == 1 for s in self.symbols)


@functools.total_ordering
@dataclass(frozen=True)
class Element:
    """A group element, stored as its normal-form word.

    Elements compare in shortlex order, the order of ball enumeration.
    """

    word: tuple[int, ...] = ()

    def __len__(self):
        return len(self.word)

    @property
    def shortlex_key(self):
        return (len(self.word), self.word)

    @property
    def is_identity(self) -> bool:
        return not self.word

    def __lt__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.shortlex_key < other.shortlex_key


WordLike = Union[str, Sequence[int], Sequence[str], Element]


def _shortlex_less(u: tuple[int, ...], v: tuple[int, ...]) -> bool:
    return (len(u), u) < (len(v), v)


@dataclass(frozen=True)
class ConfluenceReport:
    confluent: bool
    failing_critical_pairs: list = field(default_factory=list)
    checked: int = 0


class RewritingSystem:
    """A finitely presented group via a length-reducing shortlex system.

    Parameters
    ----------
    alphabet : GeneratorAlphabet
    rules : iterable of (lhs, rhs)
        Words (strings or index sequences) with ``rhs`` shortlex-smaller
        than ``lhs``.
    kind : str
        ``"free"``, ``"abelian"``, ``"free_product"`` or ``"custom"``.  Free
        groups unlock closed-form fast paths elsewhere in the package.
    params : dict
        Preset parameters, kept for serialization.
    """

    def __init__(self, alphabet: GeneratorAlphabet, rules: Iterable = (), *,
                 kind: str = "custom", params: dict | None = None, name: str | None = None):
        self.alphabet = alphabet
        self.kind = kind
        self.params = dict(params or {})
        self.name = name or kind
        explicit = []
        for lhs, rhs in rules:
            l, r = self.parse(lhs), self.parse(rhs)
            if not _shortlex_less(r, l):
                raise InputError(
                    f"rule {self._fmt(l)!r} -> {self._fmt(r)!r} is not shortlex-reducing")
            explicit.append((l, r))
        self.explicit_rules = tuple(explicit)
        cancel = [((i, j), ()) for i, j in enumerate(alphabet.inverse)]
        table: dict[tuple[int, ...], tuple[int, ...]] = {}
        for lhs, rhs in list(cancel) + explicit:
            if lhs in table and table[lhs] != rhs:
                raise InputError(f"conflicting rules for {self._fmt(lhs)!r}")
            table[lhs] = rhs
        self.rules = tuple(table.items())
        self._table = table
        self._lhs_lengths = tuple(sorted({len(l) for l in table}))

    def __repr__(self):
        return f"RewritingSystem({self.name!r}, {len(self.alphabet)} symbols, {len(self.explicit_rules)} rules)"

    # -- symbols -----------------------------------------------------------

    @property
    def n_symbols(self) -> int:
        return len(self.alphabet)

    @property
    def inverse_symbol(self) -> tuple[int, ...]:
        return self.alphabet.inverse

    @property
    def identity(self) -> Element:
        return Element(())

    @property
    def generators(self) -> list[Element]:
        return [self.normal_form((i,)) for i in range(self.n_symbols)]

    @property
    def is_free(self) -> bool:
        return self.kind == "free"

    def parse(self, w: WordLike) -> tuple[int, ...]:
        """Turn a string, a symbol list or an index list into an index tuple.

        Strings are split per character when every symbol is one character,
        otherwise on whitespace.
        """
        if isinstance(w, Element):
            return w.word
        syms = self.alphabet.symbols
        if isinstance(w, str):
            tokens = list(w) if self.alphabet.single_char else w.split()
        else:
            tokens = list(w)
        out = []
        for t in tokens:
            if isinstance(t, str):
                try:
                    out.append(syms.index(t))
                except ValueError:
                    raise InputError(f"unknown symbol {t!r}") from None
            else:
                t = int(t)
                if not 0 <= t < len(syms):
                    raise InputError(f"symbol index {t} out of range")
                out.append(t)
        return tuple(out)

    def _fmt(self, word: Sequence[int]) -> str:
        sep = "" if self.alphabet.single_char else " "
        return sep.join(self.alphabet.symbols[i] for i in word)

    def format(self, x: WordLike) -> str:
        return self._fmt(self.parse(x))

    # -- rewriting ---------------------------------------------------------

    def _reduce(self, prefix: list[int], pending: list[int]) -> tuple[int, ...]:
        # prefix must already be irreducible; pending is consumed from the end.
        table, lengths = self._table, self._lhs_lengths
        out = prefix
        while pending:
            out.append(pending.pop())
            n = len(out)
            for L in lengths:
                if L > n:
                    break
                lhs = tuple(out[n - L:])
                rhs = table.get(lhs)
                if rhs is not None:
                    del out[n - L:]
                    pending.extend(reversed(rhs))
                    break
        return tuple(out)

    def reduce_word(self, w: WordLike) -> tuple[int, ...]:
        word = self.parse(w)
        return self._reduce([], list(reversed(word)))

    def append(self, word: tuple[int, ...], s: int) -> tuple[int, ...]:
        """Normal form of ``word + (s,)`` for an already reduced ``word``."""
        return self._reduce(list(word), [s])

    def normal_form(self, w: WordLike) -> Element:
        return Element(self.reduce_word(w))

    def multiply(self, x: WordLike, y: WordLike) -> Element:
        xw = self.parse(x)
        yw = self.parse(y)
        if isinstance(x, Element):
            return Element(self._reduce(list(xw), list(reversed(yw))))
        return self.normal_form(xw + yw)

    def inverse(self, x: WordLike) -> Element:
        inv = self.alphabet.inverse
        return self.normal_form(tuple(inv[s] for s in reversed(self.parse(x))))

    def length(self, x: WordLike) -> int:
        return len(self.reduce_word(x))

    def is_reduced(self, w: WordLike) -> bool:
        word = self.parse(w)
        return self.reduce_word(word) == word

    # -- serialization -----------------------------------------------------

    def to_spec(self) -> dict:
        if self.kind == "free":
            return {"preset": "free", "rank": self.params["rank"]}
        if self.kind == "abelian":
            return {"preset": "abelian", "rank": self.params["rank"]}
        if self.kind == "free_product":
            return {"preset": "free_product", "orders": list(self.params["orders"])}
        syms = self.alphabet.symbols
        return {
            "alphabet": list(syms),
            "inverses": [syms[j] for j in self.alphabet.inverse],
            "rules": [[self._fmt(l), self._fmt(r)] for l, r in self.explicit_rules],
        }


# -- functional interface ----------------------------------------------------


def normal_form(rs: RewritingSystem, w: WordLike) -> Element:
    return rs.normal_form(w)


def multiply(rs: RewritingSystem, x: WordLike, y: WordLike) -> Element:
    return rs.multiply(x, y)


def inverse(rs: RewritingSystem, x: WordLike) -> Element:
    return rs.inverse(x)


def _critical_pairs(rules, max_len):
    for l1, r1 in rules:
        for l2, r2 in rules:
            # l2 strictly inside l1
            if len(l2) <= len(l1):
                for i in range(len(l1) - len(l2) + 1):
                    if (l1, i) == (l2, 0):
                        continue
                    if l1[i:i + len(l2)] == l2 and len(l1) <= max_len:
                        yield l1, r1, l1[:i] + r2 + l1[i + len(l2):]
            # proper overlap: suffix of l1 = prefix of l2
            for k in range(1, min(len(l1), len(l2))):
                if l1[-k:] == l2[:k]:
                    word = l1 + l2[k:]
                    if len(word) <= max_len:
                        yield word, r1 + l2[k:], l1[:-k] + r2


def check_local_confluence(rs: RewritingSystem, max_overlap_len: int = 12) -> ConfluenceReport:
    """Resolve every critical pair whose overlap word has length at most
    ``max_overlap_len``.

    Cancellation rules take part in the overlaps.  A system passing this
    check for all lengths is confluent (Newman's lemma, since shortlex
    rewriting terminates); a bounded check is only evidence.
    """
    failing = []
    checked = 0
    for word, left, right in _critical_pairs(rs.rules, max_overlap_len):
        checked += 1
        a, b = rs.reduce_word(left), rs.reduce_word(right)
        if a != b:
            failing.append((rs._fmt(word), rs._fmt(a), rs._fmt(b)))
    return ConfluenceReport(not failing, failing, checked)


# -- presets -----------------------------------------------------------------


def _letters(k: int) -> list[str]:
    if k > 26:
        raise InputError("presets support at most 26 generators")
    return list(string.ascii_lowercase[:k])


def _paired_alphabet(k: int) -> GeneratorAlphabet:
    syms, inv = [], []
    for i, c in enumerate(_letters(k)):
        syms += [c, c.upper()]
        inv += [2 * i + 1, 2 * i]
    return GeneratorAlphabet(tuple(syms), tuple(inv))


def free_group(rank: int = 2) -> RewritingSystem:
    """Free group on ``rank`` generators; symbols a, A, b, B, ..."""
    if rank < 1:
        raise InputError("free group rank must be >= 1")
    return RewritingSystem(_paired_alphabet(rank), (), kind="free",
                           params={"rank": rank}, name=f"F{rank}")


def free_abelian(rank: int = 2) -> RewritingSystem:
    """Z^rank with the standard generators; normal forms are sorted words."""
    if rank < 1:
        raise InputError("free abelian rank must be >= 1")
    alpha = _paired_alphabet(rank)
    rules = []
    for i in range(rank):
        for j in range(i + 1, rank):
            for x in (2 * i, 2 * i + 1):
                for y in (2 * j, 2 * j + 1):
                    rules.append(((y, x), (x, y)))
    return RewritingSystem(alpha, rules, kind="abelian", params={"rank": rank},
                           name=f"Z{rank}")


def free_product(*orders: int) -> RewritingSystem:
    """Free product of cyclic groups C_m1 * ... * C_mr.

    Order-2 factors get one self-inverse symbol, larger orders a pair
    x, X with x^m = 1 rewritten to the shortlex-least power.
    """
    if len(orders) == 1 and not isinstance(orders[0], int):
        orders = tuple(orders[0])
    if not orders or any(int(m) < 2 for m in orders):
        raise InputError("free product factors need orders >= 2")
    letters = _letters(len(orders))
    syms: list[str] = []
    pairs: list[str] = []
    rules = []
    for c, m in zip(letters, orders):
        m = int(m)
        if m == 2:
            syms.append(c)
            pairs.append(c)
            continue
        C = c.upper()
        syms += [c, C]
        pairs += [C, c]
        up = m // 2 + 1          # smallest a with a > m - a
        rules.append((c * up, C * (m - up)))
        down = (m + 1) // 2      # smallest b with b >= m - b
        rules.append((C * down, c * (m - down)))
    alpha = GeneratorAlphabet.from_pairs(syms, pairs)
    name = "*".join(f"C{m}" for m in orders)
    return RewritingSystem(alpha, rules, kind="free_product",
                           params={"orders": [int(m) for m in orders]}, name=name)


def group_from_spec(spec: dict) -> RewritingSystem:
    """Build a group from its JSON description.

    Accepted forms::

        {"preset": "free", "rank": 2}
        {"preset": "abelian", "rank": 2}
        {"preset": "free_product", "orders": [2, 2, 2]}
        {"alphabet": [...], "inverses": [...], "rules": [["lhs", "rhs"], ...]}
    """
    if not isinstance(spec, dict):
        raise InputError("group spec must be a JSON object")
    preset = spec.get("preset")
    if preset is not None:
        if preset == "free":
            return free_group(int(spec.get("rank", 2)))
        if preset in ("abelian", "free_abelian"):
            return free_abelian(int(spec.get("rank", 2)))
        if preset == "free_product":
            return free_product(*[int(m) for m in spec["orders"]])
        raise InputError(f"unknown preset {preset!r}")
    try:
        alpha = GeneratorAlphabet.from_pairs(spec["alphabet"], spec["inverses"])
    except KeyError as exc:
        raise InputError(f"group spec is missing {exc.args[0]!r}") from None
    return RewritingSystem(alpha, [tuple(r) for r in spec.get("rules", [])],
                           name=spec.get("name", "custom"))


def load_group(path) -> RewritingSystem:
    try:
        spec = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read group spec {path}: {exc}") from None
    return group_from_spec(spec)
