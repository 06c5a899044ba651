"""PBW monomials, normal ordering, weight-space bases and the total orders on them.

Canonical order of a PBW word: lowering modes, then zero modes and central
elements, then raising modes.  Inside each part the families come in the
order Q, M, L (c, b, a for the Heisenberg-Clifford algebra) and, for a fixed
family, modes decrease in absolute value from left to right, e.g.
``Q[-3/2]Q[-1/2]M[-2]M[-1]L[-2]L[-1]^2``.
"""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .algebra import (
    BMS,
    Generator,
    HalfInt,
    bracket_terms,
    make_generator,
    super_sign,
)
from .exactnum import ONE, ZERO, Poly

_FAMILY_RANK = {"Q": 0, "M": 1, "L": 2, "c1": 3, "c2": 4, "c": 0, "b": 1, "a": 2, "k": 3}

PBWMonomial = tuple  # tuple[Generator, ...] in canonical order


def order_key(g: Generator):
    """Sort key realizing the canonical PBW order on generators."""
    if g.twice < 0:
        return (0, _FAMILY_RANK[g.family], g.twice)
    if g.twice == 0:
        return (1, _FAMILY_RANK[g.family], 0)
    return (2, _FAMILY_RANK[g.family], -g.twice)


def _must_swap(x: Generator, y: Generator) -> bool:
    if x == y:
        return bool(x.parity)
    return order_key(x) > order_key(y)


def is_canonical(word: Sequence[Generator]) -> bool:
    return not any(_must_swap(x, y) for x, y in zip(word, word[1:]))


def monomial_str(word: Sequence[Generator]) -> str:
    """``Q[-3/2]Q[-1/2]M[-2]L[-1]^2``; the empty word prints as ``1``."""
    if not word:
        return "1"
    out = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        out.append(str(word[i]) + (f"^{j - i}" if j - i > 1 else ""))
        i = j
    return "".join(out)


_FACTOR_RE = re.compile(r"(c1|c2|k|[LMQabc]\[[+-]?\d+(?:/2)?\])(?:\^(\d+))?")


def parse_monomial(text: str) -> PBWMonomial:
    s = text.strip()
    if s == "1":
        return ()
    word = []
    pos = 0
    while pos < len(s):
        m = _FACTOR_RE.match(s, pos)
        if not m:
            raise ValueError(f"malformed PBW monomial {text!r}")
        g = Generator.parse(m.group(1))
        word.extend([g] * int(m.group(2) or 1))
        pos = m.end()
    return tuple(word)


class UEAElement:
    """Element of an enveloping algebra: canonical PBW words with Poly coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        out: dict = {}
        for w, coef in items:
            w = tuple(w)
            if not is_canonical(w):
                raise ValueError(f"{monomial_str(w)} is not in canonical PBW order")
            v = out.get(w, ZERO) + Poly.coerce(coef)
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        self.terms = out

    @classmethod
    def word(cls, *gens: Generator, coeff=ONE) -> "UEAElement":
        """Normal form of a single (possibly unordered) word."""
        return normal_form(list(gens), coeff)

    def __add__(self, other):
        return UEAElement(list(self.terms.items()) + list(other.terms.items()))

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, q) -> "UEAElement":
        q = Poly.coerce(q)
        return UEAElement({w: v * q for w, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, UEAElement):
            return self.scale(other)
        acc: dict = defaultdict(lambda: ZERO)
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                for w, q in _normal_form_word(w1 + w2, "leftmost").items():
                    acc[w] = acc[w] + c1 * c2 * q
        return UEAElement(acc)

    def __eq__(self, other):
        if isinstance(other, UEAElement):
            return self.terms == other.terms
        return NotImplemented

    def __iter__(self):
        return iter(self.terms.items())

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*{monomial_str(w)}" for w, c in sorted(self.terms.items()))

    __repr__ = __str__


_NF_CACHE: dict[str, dict] = {"leftmost": {}, "rightmost": {}}


def _normal_form_word(word: tuple, strategy: str) -> dict:
    """Normal form of a bare word as {canonical word: Fraction}; memoized."""
    cache = _NF_CACHE[strategy]
    hit = cache.get(word)
    if hit is not None:
        return hit
    bad = [i for i in range(len(word) - 1) if _must_swap(word[i], word[i + 1])]
    if not bad:
        result = {word: Fraction(1)}
    else:
        i = bad[0] if strategy == "leftmost" else bad[-1]
        x, y = word[i], word[i + 1]
        head, tail = word[:i], word[i + 2:]
        acc: dict = defaultdict(Fraction)
        if x == y:
            # odd square: x^2 = (1/2)[x, x]
            for g, v in bracket_terms(x, x):
                for w, q in _normal_form_word(head + (g,) + tail, strategy).items():
                    acc[w] += v * q / 2
        else:
            s = super_sign(x, y)
            for w, q in _normal_form_word(head + (y, x) + tail, strategy).items():
                acc[w] += s * q
            for g, v in bracket_terms(x, y):
                for w, q in _normal_form_word(head + (g,) + tail, strategy).items():
                    acc[w] += v * q
        result = {w: q for w, q in acc.items() if q}
    cache[word] = result
    return result


def normal_form(word: Sequence, coeff=ONE, strategy: str = "leftmost") -> UEAElement:
    """PBW normal form of ``coeff * word``.

    ``word`` is a sequence of generators, or of ``(coefficient, generator)``
    pairs whose coefficients are multiplied in.  Adjacent out-of-order factors
    are swapped with the super-bracket and odd squares are replaced by half
    their self-bracket; ``strategy`` picks the leftmost or rightmost offending
    pair first (the result does not depend on it).
    """
    if strategy not in _NF_CACHE:
        raise ValueError(f"unknown rewriting strategy {strategy!r}")
    total = Poly.coerce(coeff)
    gens = []
    for item in word:
        if isinstance(item, Generator):
            gens.append(item)
        else:
            q, g = item
            total = total * Poly.coerce(q)
            gens.append(g)
    if len({g.algebra for g in gens}) > 1:
        raise ValueError("word mixes generators of different algebras")
    if not total:
        return UEAElement()
    return UEAElement({w: total * q for w, q in _normal_form_word(tuple(gens), strategy).items()})


def clear_caches() -> None:
    for cache in _NF_CACHE.values():
        cache.clear()


# --- index triples -----------------------------------------------------------


def _strip(v: Iterable[int]) -> tuple[int, ...]:
    v = list(v)
    while v and v[-1] == 0:
        v.pop()
    return tuple(v)


@dataclass(frozen=True)
class IndexTriple:
    """Exponents of a lowering PBW monomial ``Q^k M^j L^i``.

    ``i[r-1]`` is the power of ``L[-r]``, ``j[r-1]`` that of ``M[-r]`` and
    ``k[t-1]`` (0 or 1) that of ``Q[-t+1/2]``.  Trailing zeros are dropped.
    """

    i: tuple[int, ...] = ()
    j: tuple[int, ...] = ()
    k: tuple[int, ...] = ()

    def __post_init__(self):
        for name in ("i", "j", "k"):
            v = _strip(getattr(self, name))
            if any(x < 0 for x in v):
                raise ValueError(f"negative exponent in {name}={v}")
            object.__setattr__(self, name, v)
        if any(x > 1 for x in self.k):
            raise ValueError(f"fermionic exponents must be 0 or 1, got k={self.k}")

    @property
    def weight(self) -> HalfInt:
        return HalfInt(2 * vec_weight(self.i) + 2 * vec_weight(self.j) + _k_twice(self.k))

    def word(self) -> PBWMonomial:
        return _triple_word(self)

    @classmethod
    def from_word(cls, word: Sequence[Generator]) -> "IndexTriple":
        return _word_triple(tuple(word))

    @classmethod
    def parse(cls, text: str) -> "IndexTriple":
        return cls.from_word(parse_monomial(text))

    def __str__(self):
        return monomial_str(self.word())


def vec_weight(v: Sequence[int]) -> int:
    return sum(r * x for r, x in enumerate(v, start=1))


def _k_twice(k: Sequence[int]) -> int:
    return sum((2 * t - 1) * x for t, x in enumerate(k, start=1))


def k_weight(k: Sequence[int]) -> Fraction:
    return Fraction(_k_twice(k), 2)


def length(t: IndexTriple) -> HalfInt:
    """Total mode depth of ``Q^k M^j L^i``."""
    return t.weight


@lru_cache(maxsize=None)
def _triple_word(t: IndexTriple) -> PBWMonomial:
    word = []
    for tt in range(len(t.k), 0, -1):
        if t.k[tt - 1]:
            word.append(Generator("Q", -(2 * tt - 1)))
    for r in range(len(t.j), 0, -1):
        word.extend([Generator("M", -2 * r)] * t.j[r - 1])
    for r in range(len(t.i), 0, -1):
        word.extend([Generator("L", -2 * r)] * t.i[r - 1])
    return tuple(word)


@lru_cache(maxsize=None)
def _word_triple(word: tuple) -> IndexTriple:
    if not is_canonical(word):
        raise ValueError(f"{monomial_str(word)} is not a canonical lowering monomial")
    vecs = {"L": defaultdict(int), "M": defaultdict(int), "Q": defaultdict(int)}
    for g in word:
        if g.algebra != BMS or g.twice >= 0 or g.family not in vecs:
            raise ValueError(f"{g} is not a lowering BMS generator")
        if g.family == "Q":
            vecs["Q"][(-g.twice + 1) // 2] += 1
        else:
            vecs[g.family][-g.twice // 2] += 1

    def dense(d):
        return tuple(d.get(r, 0) for r in range(1, max(d, default=0) + 1))

    return IndexTriple(dense(vecs["L"]), dense(vecs["M"]), dense(vecs["Q"]))


def star_dual(t: IndexTriple) -> IndexTriple:
    """Swap the L- and M-exponents; the fermionic part is unchanged."""
    return IndexTriple(i=t.j, j=t.i, k=t.k)


# --- enumeration ---------------------------------------------------------------


def _partitions(n: int, max_part: int | None = None):
    """Partitions of n as multiplicity vectors (index r-1 counts parts r)."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for p in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - p, p):
            v = list(rest) + [0] * max(0, p - len(rest))
            v[p - 1] += 1
            yield tuple(v)


def _strict_odd_parts(twice: int):
    """Subsets of {1/2, 3/2, ...} summing to twice/2, as 0/1 vectors."""
    odds = list(range(1, twice + 1, 2))
    for size in range(len(odds) + 1):
        for combo in combinations(odds, size):
            if sum(combo) == twice:
                v = [0] * ((max(combo) + 1) // 2 if combo else 0)
                for o in combo:
                    v[(o + 1) // 2 - 1] = 1
                yield tuple(v)


def _triples_of_weight(twice: int) -> list[IndexTriple]:
    out = []
    for kt in range(twice % 2, twice + 1, 2):
        rest = (twice - kt) // 2
        for k in _strict_odd_parts(kt):
            for ij in range(rest + 1):
                for i in _partitions(ij):
                    for j in _partitions(rest - ij):
                        out.append(IndexTriple(i, j, k))
    return out


def weight_basis(n) -> list[IndexTriple]:
    """All triples of length ``n``, sorted from largest to smallest in the
    principal order used for the Gram and D matrices."""
    n = HalfInt.of(n)
    if n.twice < 0:
        return []
    triples = _triples_of_weight(n.twice)
    return sorted(triples, key=cmp_to_key(lambda x, y: compare("principal_Sn", x, y)), reverse=True)


def partition_count(n) -> int:
    """Coefficient of q^n in prod_{k in N+1/2}(1+q^k) / prod_{k>=1}(1-q^k)^2."""
    n = HalfInt.of(n)
    N = n.twice
    if N < 0:
        return 0
    # series in the variable q^(1/2)
    series = [0] * (N + 1)
    series[0] = 1
    for odd in range(1, N + 1, 2):
        for e in range(N, odd - 1, -1):
            series[e] += series[e - odd]
    for _ in range(2):
        for step in range(2, N + 1, 2):
            for e in range(step, N + 1):
                series[e] += series[e - step]
    return series[N]


# --- orders -------------------------------------------------------------------

ORDERS = ("lex_gt", "revlex", "principal_Sn", "principal_induced")


def _pad(x: Sequence[int], y: Sequence[int]):
    n = max(len(x), len(y))
    return list(x) + [0] * (n - len(x)), list(y) + [0] * (n - len(y))


def _cmp(a, b) -> int:
    return (a > b) - (a < b)


def lex_cmp(x: Sequence[int], y: Sequence[int]) -> int:
    """x > y iff at the largest index where they differ, x is bigger."""
    x, y = _pad(x, y)
    for r in range(len(x) - 1, -1, -1):
        if x[r] != y[r]:
            return _cmp(x[r], y[r])
    return 0


def revlex_cmp(x: Sequence[int], y: Sequence[int]) -> int:
    """x < y iff at the smallest index where they differ, x is smaller."""
    x, y = _pad(x, y)
    for r in range(len(x)):
        if x[r] != y[r]:
            return _cmp(x[r], y[r])
    return 0


def _principal_sn(x: IndexTriple, y: IndexTriple) -> int:
    wj, wj1 = vec_weight(x.j), vec_weight(y.j)
    if wj != wj1:
        return _cmp(wj, wj1)
    if x.j != y.j:
        # equal |j|: the lexicographically smaller j is the larger element
        return lex_cmp(y.j, x.j)
    wk, wk1 = _k_twice(x.k), _k_twice(y.k)
    if wk != wk1:
        return _cmp(wk, wk1)
    if x.k != y.k:
        return lex_cmp(x.k, y.k)
    return lex_cmp(x.i, y.i)


def _principal_induced(x: IndexTriple, y: IndexTriple) -> int:
    c = _cmp(x.weight.twice, y.weight.twice)
    if c:
        return c
    if x.i != y.i:
        # reversed: x is smaller when y.i precedes x.i
        return revlex_cmp(y.i, x.i)
    if x.k != y.k:
        return revlex_cmp(x.k, y.k)
    return revlex_cmp(x.j, y.j)


def compare(order: str, x, y) -> int:
    """Three-way comparison (-1, 0, 1) in one of the named total orders.

    ``lex_gt`` and ``revlex`` take exponent vectors; ``principal_Sn`` and
    ``principal_induced`` take :class:`IndexTriple` values.
    """
    if order in ("lex_gt", "revlex"):
        if isinstance(x, IndexTriple) or isinstance(y, IndexTriple):
            raise TypeError(f"order {order!r} compares exponent vectors, not triples")
        return lex_cmp(x, y) if order == "lex_gt" else revlex_cmp(x, y)
    if order in ("principal_Sn", "principal_induced"):
        if not (isinstance(x, IndexTriple) and isinstance(y, IndexTriple)):
            raise TypeError(f"order {order!r} compares IndexTriple values")
        return _principal_sn(x, y) if order == "principal_Sn" else _principal_induced(x, y)
    raise ValueError(f"unknown order {order!r}; expected one of {ORDERS}")


def degree(v_support: Iterable[IndexTriple]) -> IndexTriple:
    """Largest element of a support set in the induced principal order."""
    support = list(v_support)
    if not support:
        raise ValueError("degree of the zero vector is undefined")
    return max(support, key=cmp_to_key(lambda x, y: compare("principal_induced", x, y)))


def uea_degree(x: UEAElement) -> HalfInt:
    """Common mode degree of a homogeneous element (raises if inhomogeneous)."""
    degs = {sum(g.twice for g in w if not g.is_central()) for w in x.terms}
    if len(degs) != 1:
        raise ValueError("element is not homogeneous")
    return HalfInt(degs.pop())


def generators_up_to(bound: int, algebra: str = BMS, central: bool = True) -> list[Generator]:
    """All generators with |mode| <= bound (integer ``bound``), in a fixed order."""
    fams = ("L", "M", "Q") if algebra == BMS else ("a", "b", "c")
    out = []
    for f in fams:
        odd = f in ("Q", "c")
        for t in range(-2 * bound, 2 * bound + 1):
            if (t % 2 == 1) == odd:
                out.append(make_generator(f, HalfInt(t)))
    if central:
        out.extend([Generator("c1", 0), Generator("c2", 0)] if algebra == BMS else [Generator("k", 0)])
    return out
