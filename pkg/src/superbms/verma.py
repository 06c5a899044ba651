"""Verma modules over the N=1 BMS superalgebra and their contravariant form."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .algebra import Generator, HalfInt, L, M, Q, bar, bracket_terms, super_sign
from .exactnum import (
    ONE,
    ZERO,
    Poly,
    PolyMatrix,
    det_fraction_free,
    format_rational,
    rational_det,
    rational_nullspace,
)
from .pbw import (
    IndexTriple,
    UEAElement,
    order_key,
    parse_monomial,
    star_dual,
    weight_basis,
)


@dataclass(frozen=True)
class WeightParams:
    """Highest weight (h1, h2) and central charge (c1, c2); each a Poly."""

    h1: Poly
    h2: Poly
    c1: Poly
    c2: Poly

    def __post_init__(self):
        for name in ("h1", "h2", "c1", "c2"):
            object.__setattr__(self, name, Poly.coerce(getattr(self, name)))

    @classmethod
    def symbolic(cls) -> "WeightParams":
        return cls(Poly.var("h1"), Poly.var("h2"), Poly.var("c1"), Poly.var("c2"))

    @classmethod
    def numeric(cls, h1, h2, c1, c2) -> "WeightParams":
        return cls(*(Poly.const(Fraction(x)) for x in (h1, h2, c1, c2)))

    def is_numeric(self) -> bool:
        return all(p.is_constant() for p in self.as_tuple())

    def as_tuple(self) -> tuple[Poly, Poly, Poly, Poly]:
        return (self.h1, self.h2, self.c1, self.c2)

    def subs(self, assignment: Mapping) -> "WeightParams":
        return WeightParams(*(p.subs(assignment) for p in self.as_tuple()))

    def zero_mode_value(self, g: Generator) -> Poly:
        return {
            ("L", 0): self.h1, ("M", 0): self.h2, ("c1", 0): self.c1, ("c2", 0): self.c2,
        }[(g.family, g.twice)]


class VermaVector:
    """Finite combination of PBW basis vectors ``Q^k M^j L^i 1``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[IndexTriple, object] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        out: dict[IndexTriple, Poly] = {}
        for t, coef in items:
            v = out.get(t, ZERO) + Poly.coerce(coef)
            if v:
                out[t] = v
            else:
                out.pop(t, None)
        self.terms = out

    @classmethod
    def basis(cls, t: IndexTriple | str) -> "VermaVector":
        if isinstance(t, str):
            t = IndexTriple.parse(t)
        return cls({t: ONE})

    @classmethod
    def _from_words(cls, d: Mapping[tuple, Poly]) -> "VermaVector":
        return cls((IndexTriple.from_word(w), v) for w, v in d.items())

    def _words(self) -> dict[tuple, Poly]:
        return {t.word(): v for t, v in self.terms.items()}

    def __add__(self, other):
        return VermaVector(list(self.terms.items()) + list(other.terms.items()))

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, q) -> "VermaVector":
        q = Poly.coerce(q)
        return VermaVector({t: v * q for t, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, VermaVector):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __bool__(self):
        return bool(self.terms)

    def coefficient(self, t: IndexTriple | str) -> Poly:
        if isinstance(t, str):
            t = IndexTriple.parse(t)
        return self.terms.get(t, ZERO)

    def weights(self) -> set[HalfInt]:
        return {t.weight for t in self.terms}

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*{t}" for t, c in sorted(self.terms.items(), key=lambda kv: str(kv[0])))

    __repr__ = __str__


def _add_into(acc: dict, d: Mapping, q) -> None:
    for w, v in d.items():
        s = acc.get(w)
        s = v * q if s is None else s + v * q
        if s:
            acc[w] = s
        else:
            acc.pop(w, None)


class VermaModule:
    """M(h1, h2, c1, c2) with memoized generator actions on PBW basis words."""

    def __init__(self, params: WeightParams):
        self.params = params
        self._cache: dict = {}

    def act_gen(self, g: Generator, word: tuple) -> dict:
        """``g . (word 1)`` as {canonical lowering word: Poly}."""
        key = (g, word)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._act_gen(g, word)
            self._cache[key] = hit
        return hit

    def _act_gen(self, g: Generator, word: tuple) -> dict:
        if g.is_central():
            val = self.params.zero_mode_value(g)
            return {word: val} if val else {}
        if not word:
            if g.twice > 0:
                return {}
            if g.twice == 0:
                val = self.params.zero_mode_value(g)
                return {(): val} if val else {}
            return {(g,): ONE}
        y, rest = word[0], word[1:]
        if g.twice < 0:
            if g == y:
                if not g.parity:
                    return {(g,) + word: ONE}
                # odd square of a lowering mode: Q_r Q_r = M_{2r}
                acc: dict = {}
                for h, v in bracket_terms(g, g):
                    _add_into(acc, self.act_gen(h, rest), v / 2)
                return acc
            if order_key(g) < order_key(y):
                return {(g,) + word: ONE}
        # g y rest = (+-) y (g rest) + [g, y] rest
        acc = {}
        sign = super_sign(g, y)
        for w, v in self.act_gen(g, rest).items():
            _add_into(acc, self.act_gen(y, w), v * sign)
        for h, v in bracket_terms(g, y):
            _add_into(acc, self.act_gen(h, rest), v)
        return acc

    def act_word(self, word: Sequence[Generator], v: Mapping[tuple, Poly]) -> dict:
        """Apply ``word`` (leftmost factor last) to a word-keyed vector."""
        cur = dict(v)
        for g in reversed(word):
            nxt: dict = {}
            for w, coef in cur.items():
                _add_into(nxt, self.act_gen(g, w), coef)
            cur = nxt
            if not cur:
                break
        return cur

    def act(self, x, v: VermaVector) -> VermaVector:
        words = v._words()
        acc: dict = {}
        for word, coef in _uea_terms(x):
            _add_into(acc, self.act_word(word, words), coef)
        return VermaVector._from_words(acc)

    def pair_words(self, u: tuple, v: tuple) -> Poly:
        """<u 1, v 1> for canonical lowering words."""
        key = ("form", u, v)
        hit = self._cache.get(key)
        if hit is None:
            bar_word = tuple(bar(g) for g in reversed(u))
            hit = self.act_word(bar_word, {v: ONE}).get((), ZERO)
            self._cache[key] = hit
        return hit

    def form(self, u: VermaVector, v: VermaVector) -> Poly:
        total = ZERO
        for tu, cu in u.terms.items():
            for tv, cv in v.terms.items():
                if tu.weight != tv.weight:
                    continue
                total = total + cu * cv * self.pair_words(tu.word(), tv.word())
        return total


def _uea_terms(x):
    if isinstance(x, Generator):
        return [((x,), ONE)]
    if isinstance(x, UEAElement):
        return list(x.terms.items())
    if isinstance(x, str):
        return [(parse_monomial(x), ONE)]
    # any word: sequence of generators, applied as written
    return [(tuple(x), ONE)]


@lru_cache(maxsize=64)
def module(params: WeightParams) -> VermaModule:
    return VermaModule(params)


def _params(params: WeightParams | None) -> WeightParams:
    return WeightParams.symbolic() if params is None else params


def act(x, v: VermaVector, params: WeightParams | None = None) -> VermaVector:
    """Action of a generator, a word, or a :class:`UEAElement` on ``v``."""
    return module(_params(params)).act(x, v)


def contravariant_form(u: VermaVector, v: VermaVector, params: WeightParams | None = None) -> Poly:
    """<u, v>: the coefficient of 1 in bar(u) . v, extended bilinearly."""
    return module(_params(params)).form(u, v)


@dataclass
class GramData:
    level: HalfInt
    basis: list[IndexTriple]
    gram: PolyMatrix
    dmat: PolyMatrix
    params: WeightParams = field(default_factory=WeightParams.symbolic)

    def diagonal(self) -> list[Poly]:
        return self.dmat.diagonal()

    def diagonal_product(self) -> Poly:
        out = ONE
        for d in self.diagonal():
            out = out * d
        return out

    def star_sign(self) -> int:
        return star_permutation_sign(self.basis)

    def det(self) -> Poly:
        return det_fraction_free(self.gram)

    def to_json(self, include_det: bool = True) -> dict:
        out = {
            "level": format_level(self.level),
            "basis": [str(t) for t in self.basis],
            "gram": self.gram.to_strings(),
            "dmat": self.dmat.to_strings(),
        }
        if include_det:
            out["det"] = str(self.det())
        out["diagonal"] = [str(d) for d in self.diagonal()]
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "GramData":
        basis = [IndexTriple.from_word(parse_monomial(s)) for s in data["basis"]]
        gram = PolyMatrix([[Poly.parse(x) for x in row] for row in data["gram"]])
        dmat = PolyMatrix([[Poly.parse(x) for x in row] for row in data["dmat"]])
        return cls(HalfInt.of(data["level"]), basis, gram, dmat)


def star_permutation_sign(basis: Sequence[IndexTriple]) -> int:
    """Sign of the permutation sending each basis element to its star dual."""
    pos = {t: n for n, t in enumerate(basis)}
    perm = [pos[star_dual(t)] for t in basis]
    seen = [False] * len(perm)
    sign = 1
    for s in range(len(perm)):
        if seen[s]:
            continue
        n = 0
        x = s
        while not seen[x]:
            seen[x] = True
            x = perm[x]
            n += 1
        if n % 2 == 0:
            sign = -sign
    return sign


def gram_data(n, params: WeightParams | None = None) -> GramData:
    """Gram matrix <b_i, b_j> and the matrix <b_i, b_j*> at level ``n``."""
    params = _params(params)
    n = HalfInt.of(n)
    mod = module(params)
    basis = weight_basis(n)
    words = [t.word() for t in basis]
    gram = [[mod.pair_words(u, v) for v in words] for u in words]
    dual = [star_dual(t).word() for t in basis]
    dmat = [[mod.pair_words(u, v) for v in dual] for u in words]
    return GramData(n, basis, PolyMatrix(gram), PolyMatrix(dmat), params)


# --- simplicity ------------------------------------------------------------------


@dataclass(frozen=True)
class SimplicityReport:
    simple: bool
    violations: tuple[int, ...]
    exhaustive: bool  # True when every positive i was decided, not just 1..max_i

    def __bool__(self):
        return self.simple


def _isqrt_exact(q: Fraction) -> int | None:
    if q.denominator != 1 or q.numerator < 0:
        return None
    r = math.isqrt(q.numerator)
    return r if r * r == q.numerator else None


def verma_simple(h2, c2, max_i: int = 50) -> SimplicityReport:
    """Which i >= 1 make h2 + (i^2 - 1)/24 * c2 vanish.

    For c2 != 0 the single candidate i = sqrt(1 - 24 h2 / c2) is checked in
    closed form.  For c2 = 0 either no i or every i violates; in the latter
    case the violations are listed up to ``max_i``.
    """
    if max_i < 1:
        raise ValueError("max_i must be at least 1")
    h2, c2 = Fraction(h2), Fraction(c2)
    if c2 == 0:
        if h2 != 0:
            return SimplicityReport(True, (), True)
        return SimplicityReport(False, tuple(range(1, max_i + 1)), True)
    root = _isqrt_exact(1 - 24 * h2 / c2)
    if root is not None and root >= 1:
        return SimplicityReport(False, (root,), True)
    return SimplicityReport(True, (), True)


def vacuum_simple(c2) -> bool:
    return Fraction(c2) != 0


def violation_level(i: int) -> HalfInt:
    """First level whose Gram determinant carries the factor for ``i``.

    L[-i] and M[-i] carry it at level i; for odd i, Q[-i/2] already carries
    it at level i/2.
    """
    if i < 1:
        raise ValueError("i must be positive")
    return HalfInt(i) if i % 2 else HalfInt(2 * i)


# --- singular vectors -------------------------------------------------------------


def raising_generators(cutoff: int) -> list[Generator]:
    out = []
    for m in range(1, cutoff + 1):
        out.extend([L(m), M(m), Q(Fraction(2 * m - 1, 2))])
    return out


def singular_vectors(n, params: WeightParams, mode_cutoff: int | None = None) -> list[VermaVector]:
    """Basis of the weight-``n`` vectors annihilated by every raising mode."""
    if not params.is_numeric():
        raise ValueError("singular_vectors needs numeric weight parameters")
    n = HalfInt.of(n)
    if n.twice < 0:
        return []
    if mode_cutoff is None:
        mode_cutoff = (n.twice + 3) // 2
    if 2 * mode_cutoff < n.twice + 2:
        raise ValueError(f"mode_cutoff must be at least n + 1 = {n + 1}")
    mod = module(params)
    basis = weight_basis(n)
    words = [t.word() for t in basis]
    rows: list[list[Fraction]] = []
    for g in raising_generators(mode_cutoff):
        images = [mod.act_gen(g, w) for w in words]
        targets = sorted({t for img in images for t in img}, key=str)
        for t in targets:
            rows.append([img.get(t, ZERO).constant_value() for img in images])
    null = rational_nullspace(rows, len(basis))
    return [VermaVector({basis[j]: x for j, x in enumerate(vec) if x}) for vec in null]


def is_singular(v: VermaVector, params: WeightParams, mode_cutoff: int | None = None) -> bool:
    if not v:
        return False
    top = max(t.weight.twice for t in v.terms)
    cutoff = mode_cutoff if mode_cutoff is not None else top // 2 + 1
    return all(not act(g, v, params) for g in raising_generators(cutoff))


# --- determinant checks ------------------------------------------------------------


def det_identity_symbolic(n, params: WeightParams | None = None) -> tuple[bool, Poly, Poly]:
    """Check det(G_n) = sign * prod d_ii exactly.  Returns (ok, det, signed product)."""
    g = gram_data(n, params)
    det = g.det()
    prod = g.diagonal_product() * g.star_sign()
    return det == prod and g.dmat.is_lower_triangular(), det, prod


def det_identity_at(n, point: Mapping[str, Fraction]) -> tuple[bool, Fraction, Fraction]:
    """Same identity at a rational point, computed entirely over Q."""
    params = WeightParams.numeric(point["h1"], point["h2"], point["c1"], point["c2"])
    g = gram_data(n, params)
    det = rational_det([[x.constant_value() for x in row] for row in g.gram.entries])
    prod = g.star_sign() * math.prod((d.constant_value() for d in g.diagonal()), start=Fraction(1))
    return det == prod and g.dmat.is_lower_triangular(), det, prod


# --- diagonal formulas ------------------------------------------------------------


def _fac(c2_coeff: Fraction, h2: Poly, c2: Poly) -> Poly:
    return h2 * 2 + c2 * c2_coeff


def naive_diagonal_product(t: IndexTriple, params: WeightParams | None = None,
                           fermion_index: str = "position") -> Poly:
    """Naive product formula for d_ii, kept for comparison only.

    Integer-mode factors are ``r * (2h2 + (r^2-1)/12 c2)^{i_r}`` with no
    multiplicity factorial.  The fermionic factor is ``2h2 + (4t^2-1)/12 c2``
    where t is either the position index of ``Q[-t+1/2]`` (``"position"``) or
    the mode itself (``"mode"``).  The mode reading agrees with the computed
    fermionic factors; the missing factorial still breaks repeated L/M modes.
    """
    if fermion_index not in ("position", "mode"):
        raise ValueError(f"unknown fermion_index {fermion_index!r}")
    p = _params(params)
    out = ONE
    for vec in (t.i, t.j):
        for r, e in enumerate(vec, start=1):
            if e:
                out = out * r * _fac(Fraction(r * r - 1, 12), p.h2, p.c2) ** e
    for pos, e in enumerate(t.k, start=1):
        if e:
            tt = Fraction(pos) if fermion_index == "position" else Fraction(2 * pos - 1, 2)
            out = out * _fac((4 * tt * tt - 1) / 12, p.h2, p.c2)
    return out


def diagonal_closed_form(t: IndexTriple, params: WeightParams | None = None) -> Poly:
    """Product formula for d_ii that matches the computed D-matrix diagonal.

    Each L/M mode r with multiplicity e contributes e! * (r (2h2 + (r^2-1)/12 c2))^e;
    each Q[-s] present contributes 2h2 + (s^2 - 1/4)/3 c2.
    """
    p = _params(params)
    out = ONE
    for vec in (t.i, t.j):
        for r, e in enumerate(vec, start=1):
            if e:
                base = _fac(Fraction(r * r - 1, 12), p.h2, p.c2) * r
                out = out * math.factorial(e) * base ** e
    for tt, e in enumerate(t.k, start=1):
        if e:
            s = Fraction(2 * tt - 1, 2)
            out = out * _fac((s * s - Fraction(1, 4)) / 3, p.h2, p.c2)
    return out


@dataclass(frozen=True)
class DiagonalEntry:
    basis: IndexTriple
    computed: Poly
    naive: Poly
    closed_form: Poly

    @property
    def naive_matches(self) -> bool:
        return self.computed == self.naive


def diagonal_report(n, params: WeightParams | None = None) -> list[DiagonalEntry]:
    g = gram_data(n, params)
    return [
        DiagonalEntry(t, d, naive_diagonal_product(t, params), diagonal_closed_form(t, params))
        for t, d in zip(g.basis, g.diagonal())
    ]


def format_level(n: HalfInt) -> str:
    return format_rational(n.value)
