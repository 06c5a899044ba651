"""Structure constants for the N=1 BMS superalgebra and the Heisenberg-Clifford algebra.

Both algebras are described by generators with half-integer mode indices.
The BMS superalgebra has even modes ``L[n]``, ``M[n]``, odd modes ``Q[r]``
and central elements ``c1``, ``c2``; the Heisenberg-Clifford algebra has
bosons ``a[n]``, ``b[n]``, neutral fermions ``c[r]`` and the central ``k``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple, Union

from .exactnum import ONE, ZERO, Poly, parse_rational

BMS = "BMS"
HC = "HC"

_ALGEBRA_OF = {
    "L": BMS, "M": BMS, "Q": BMS, "c1": BMS, "c2": BMS,
    "a": HC, "b": HC, "c": HC, "k": HC,
}
ODD_FAMILIES = frozenset({"Q", "c"})
CENTRAL_FAMILIES = frozenset({"c1", "c2", "k"})


@dataclass(frozen=True, order=True)
class HalfInt:
    """An element of (1/2)Z, stored as twice its value."""

    twice: int

    @classmethod
    def of(cls, value: Union["HalfInt", int, Fraction, str]) -> "HalfInt":
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, str):
            value = parse_rational(value)
        q = Fraction(value) * 2
        if q.denominator != 1:
            raise ValueError(f"{value} is not a half-integer")
        return cls(int(q))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice, 2)

    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __add__(self, other):
        return HalfInt(self.twice + HalfInt.of(other).twice)

    def __sub__(self, other):
        return HalfInt(self.twice - HalfInt.of(other).twice)

    def __neg__(self):
        return HalfInt(-self.twice)

    def __str__(self):
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"


class Generator(NamedTuple):
    """A basis element of one of the two algebras.

    ``twice`` is twice the mode index (0 for central elements).  Build them
    with :func:`L`, :func:`M`, :func:`Q`, :func:`a`, :func:`b`, :func:`c`
    or :meth:`parse` rather than directly, so the index parity is checked.
    """

    family: str
    twice: int

    @property
    def algebra(self) -> str:
        return _ALGEBRA_OF[self.family]

    @property
    def index(self) -> HalfInt | None:
        return None if self.family in CENTRAL_FAMILIES else HalfInt(self.twice)

    @property
    def mode(self) -> Fraction:
        return Fraction(self.twice, 2)

    @property
    def parity(self) -> int:
        return 1 if self.family in ODD_FAMILIES else 0

    def is_central(self) -> bool:
        return self.family in CENTRAL_FAMILIES

    def __str__(self):
        if self.family in CENTRAL_FAMILIES:
            return self.family
        return f"{self.family}[{HalfInt(self.twice)}]"

    def __repr__(self):
        return str(self)

    @staticmethod
    def parse(text: str) -> "Generator":
        s = text.strip()
        if s in CENTRAL_FAMILIES:
            return Generator(s, 0)
        m = re.fullmatch(r"([LMQabc])\[([+-]?\d+(?:/2)?)\]", s)
        if not m:
            raise ValueError(f"malformed generator {text!r}")
        return make_generator(m.group(1), HalfInt.of(m.group(2)))


def make_generator(family: str, index=None) -> Generator:
    if family not in _ALGEBRA_OF:
        raise ValueError(f"unknown generator family {family!r}")
    if family in CENTRAL_FAMILIES:
        if index not in (None, 0):
            raise ValueError(f"central element {family} takes no index")
        return Generator(family, 0)
    t = HalfInt.of(index).twice
    odd = family in ODD_FAMILIES
    if odd != (t % 2 != 0):
        kind = "half-odd" if odd else "integer"
        raise ValueError(f"{family} needs an {kind} index, got {HalfInt(t)}")
    return Generator(family, t)


def L(n) -> Generator:
    return make_generator("L", n)


def M(n) -> Generator:
    return make_generator("M", n)


def Q(r) -> Generator:
    return make_generator("Q", r)


def a(n) -> Generator:
    return make_generator("a", n)


def b(n) -> Generator:
    return make_generator("b", n)


def c(r) -> Generator:
    return make_generator("c", r)


C1 = Generator("c1", 0)
C2 = Generator("c2", 0)
K = Generator("k", 0)


class AlgebraElement:
    """Finite linear combination of generators with :class:`Poly` coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Generator, object] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        out: dict[Generator, Poly] = {}
        for g, coef in items:
            coef = Poly.coerce(coef)
            v = out.get(g, ZERO) + coef
            if v:
                out[g] = v
            else:
                out.pop(g, None)
        self.terms = out

    @classmethod
    def of(cls, x: Union["AlgebraElement", Generator]) -> "AlgebraElement":
        if isinstance(x, AlgebraElement):
            return x
        return cls({x: ONE})

    def __add__(self, other):
        other = AlgebraElement.of(other)
        return AlgebraElement(list(self.terms.items()) + list(other.terms.items()))

    def __sub__(self, other):
        return self + AlgebraElement.of(other).scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, q) -> "AlgebraElement":
        q = Poly.coerce(q)
        return AlgebraElement({g: v * q for g, v in self.terms.items()})

    def __rmul__(self, q):
        return self.scale(q)

    def __eq__(self, other):
        if isinstance(other, Generator):
            other = AlgebraElement.of(other)
        if isinstance(other, AlgebraElement):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({coef})*{g}" for g, coef in sorted(self.terms.items()))

    __repr__ = __str__

    def algebra(self) -> str | None:
        algs = {g.algebra for g in self.terms}
        if len(algs) > 1:
            raise ValueError("element mixes BMS and HC generators")
        return algs.pop() if algs else None


def _kron(x: int) -> int:
    return 1 if x == 0 else 0


@lru_cache(maxsize=None)
def bracket_terms(x: Generator, y: Generator) -> tuple[tuple[Generator, Fraction], ...]:
    """Super-bracket of two generators as rational structure constants."""
    if x.algebra != y.algebra:
        raise ValueError(f"cannot bracket {x} ({x.algebra}) with {y} ({y.algebra})")
    fx, fy = x.family, y.family
    if fx in CENTRAL_FAMILIES or fy in CENTRAL_FAMILIES:
        return ()
    if x.algebra == BMS:
        return _bms_bracket(x, y)
    return _hc_bracket(x, y)


def _bms_bracket(x: Generator, y: Generator):
    fx, fy = x.family, y.family
    m, n = Fraction(x.twice, 2), Fraction(y.twice, 2)
    tot = x.twice + y.twice
    if fx == "L" and fy in ("L", "M"):
        out = []
        if m != n:
            out.append((Generator(fy, tot), m - n))
        if tot == 0 and m ** 3 != m:
            out.append((C1 if fy == "L" else C2, (m ** 3 - m) / 12))
        return tuple(out)
    if fx == "M" and fy == "L":
        return tuple((g, -v) for g, v in _bms_bracket(y, x))
    if fx == "Q" and fy == "Q":
        out = [(Generator("M", tot), Fraction(2))]
        if tot == 0 and m * m != Fraction(1, 4):
            out.append((C2, (m * m - Fraction(1, 4)) / 3))
        return tuple(out)
    if fx == "L" and fy == "Q":
        coef = m / 2 - n
        return ((Generator("Q", tot), coef),) if coef else ()
    if fx == "Q" and fy == "L":
        return tuple((g, -v) for g, v in _bms_bracket(y, x))
    # [M, M] = [M, Q] = [Q, M] = 0
    return ()


def _hc_bracket(x: Generator, y: Generator):
    fx, fy = x.family, y.family
    if x.twice + y.twice != 0:
        return ()
    if {fx, fy} == {"a", "b"}:
        # [a_m, b_{-m}] = m k and [b_m, a_{-m}] = m k
        m = Fraction(x.twice, 2)
        return ((K, m),) if m else ()
    if fx == "c" and fy == "c":
        return ((K, Fraction(1)),)
    return ()


def bracket(x, y) -> AlgebraElement:
    """Super-bracket, bilinear in generators or :class:`AlgebraElement` arguments."""
    if isinstance(x, Generator) and isinstance(y, Generator):
        return AlgebraElement(bracket_terms(x, y))
    xs, ys = AlgebraElement.of(x), AlgebraElement.of(y)
    acc = []
    for gx, cx in xs:
        for gy, cy in ys:
            for g, v in bracket_terms(gx, gy):
                acc.append((g, cx * cy * v))
    return AlgebraElement(acc)


def super_sign(x: Generator, y: Generator) -> int:
    """(-1)^{|x||y|}."""
    return -1 if x.parity and y.parity else 1


def bar(g: Generator) -> Generator:
    """Anti-involution on a single BMS generator."""
    if g.algebra != BMS:
        raise ValueError(f"the anti-involution is only defined on the BMS superalgebra, got {g}")
    return Generator(g.family, -g.twice)


def anti_involution(x):
    if isinstance(x, Generator):
        return bar(x)
    return AlgebraElement((bar(g), v) for g, v in AlgebraElement.of(x))


def degree_parity(g: Generator) -> tuple[HalfInt, int]:
    return HalfInt(0 if g.is_central() else g.twice), g.parity
