"""Heisenberg-Clifford modules and the free-field realization of the N=1 BMS superalgebra.

A level-1 smooth module over the Heisenberg-Clifford algebra (bosons a, b and
a neutral fermion c) carries BMS modes built from normal-ordered quadratics:

    L_n = sum_m :a_m b_{n-m}: - (n+1) rho a_n - 1/2 sum_s (s+1/2) :c_s c_{n-s}:
    M_n = 1/2 sum_m b_m b_{n-m} - (n+1) rho b_n
    Q_r = sum_s b_{r-s} c_s - 2 (r+1/2) rho c_r

with c1 = 5/2 and c2 = -12 rho^2.  Sums are cut to the finite window of
modes that can act nontrivially on the vector at hand.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .algebra import (
    BMS,
    HC,
    C1,
    C2,
    K,
    AlgebraElement,
    Generator,
    HalfInt,
    L,
    M,
    Q,
    a as a_,
    b as b_,
    bracket_terms,
    c as c_,
    super_sign,
)
from .exactnum import ONE, ZERO, Poly, format_rational
from .pbw import _partitions, _strict_odd_parts, monomial_str, order_key, parse_monomial, partition_count
from .verma import WeightParams

FockMonomial = tuple  # canonical tuple of negative HC modes


@dataclass(frozen=True)
class HcModuleSpec:
    """Which cyclic Heisenberg-Clifford module the Fock vectors live in.

    ``kind="verma"``: M_hc(level, a, b); a_0, b_0 act by ``a``, ``b`` and
    positive modes kill the cyclic vector.  ``kind="whittaker"``: every
    nonnegative boson mode acts on w_phi by ``phi`` (missing keys are 0),
    positive fermion modes kill it, and k acts by ``phi[k]``.
    """

    kind: str
    level: Poly = ONE
    a: Poly = ZERO
    b: Poly = ZERO
    phi: tuple = ()

    def __post_init__(self):
        if self.kind not in ("verma", "whittaker"):
            raise ValueError(f"unknown module kind {self.kind!r}")
        object.__setattr__(self, "level", Poly.coerce(self.level))
        object.__setattr__(self, "a", Poly.coerce(self.a))
        object.__setattr__(self, "b", Poly.coerce(self.b))
        phi = tuple(sorted((g, Poly.coerce(v)) for g, v in dict(self.phi).items()))
        for g, _ in phi:
            if g.algebra != HC or (g.family != "k" and g.twice < 0):
                raise ValueError(f"phi is defined on nonnegative HC modes, got {g}")
            if g.family == "c" and g.twice > 0 and dict(phi)[g]:
                raise ValueError("phi must vanish on positive fermion modes")
        object.__setattr__(self, "phi", phi)
        if self.kind == "whittaker":
            if K not in dict(phi):
                raise ValueError("a Whittaker spec must give phi(k)")
            object.__setattr__(self, "level", dict(phi)[K])

    @classmethod
    def verma(cls, level=1, a="a", b="b") -> "HcModuleSpec":
        return cls("verma", level=level, a=_sym(a), b=_sym(b))

    @classmethod
    def whittaker(cls, phi_a0="phi_a0", phi_a1="phi_a1", phi_b0="phi_b0", phi_b1="phi_b1",
                  phi_k=1, extra: Mapping[Generator, object] | None = None) -> "HcModuleSpec":
        phi = {a_(0): _sym(phi_a0), a_(1): _sym(phi_a1), b_(0): _sym(phi_b0),
               b_(1): _sym(phi_b1), K: _sym(phi_k)}
        phi.update(extra or {})
        return cls("whittaker", phi=tuple(phi.items()))

    def phi_value(self, g: Generator) -> Poly:
        return dict(self.phi).get(g, ZERO)

    def cyclic_value(self, g: Generator) -> Poly:
        """Scalar by which a nonnegative mode (or k) acts on the cyclic vector."""
        if g.family == "k":
            return self.level
        if g.twice < 0:
            raise ValueError(f"{g} is a creation mode")
        if self.kind == "verma":
            if g.twice == 0:
                return self.a if g.family == "a" else self.b
            return ZERO
        return self.phi_value(g)

    def reach(self) -> int:
        """Largest positive mode that can act nontrivially on the cyclic vector."""
        if self.kind == "verma":
            return 0
        return max((g.twice // 2 for g, v in self.phi if v and g.family != "k"), default=0)


def _sym(x) -> Poly:
    if isinstance(x, str):
        try:
            return Poly.var(x)
        except ValueError:
            return Poly.parse(x)
    return Poly.coerce(x)


@dataclass(frozen=True)
class FfrParams:
    rho: Poly = field(default_factory=lambda: Poly.var("rho"))

    def __post_init__(self):
        object.__setattr__(self, "rho", _sym(self.rho))

    @property
    def central_charges(self) -> tuple[Poly, Poly]:
        return Poly.const(Fraction(5, 2)), self.rho * self.rho * -12


class FockVector:
    """Finite combination of negative-mode monomials applied to the cyclic vector."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        out: dict = {}
        for w, coef in items:
            w = tuple(w)
            v = out.get(w, ZERO) + Poly.coerce(coef)
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        self.terms = out

    @classmethod
    def cyclic(cls) -> "FockVector":
        return cls({(): ONE})

    @classmethod
    def basis(cls, mono) -> "FockVector":
        if isinstance(mono, str):
            mono = parse_monomial(mono)
        return cls({canonical_monomial(mono): ONE})

    def __add__(self, other):
        return FockVector(list(self.terms.items()) + list(other.terms.items()))

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, q) -> "FockVector":
        q = Poly.coerce(q)
        return FockVector({w: v * q for w, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, FockVector):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def coefficient(self, mono) -> Poly:
        if isinstance(mono, str):
            mono = parse_monomial(mono)
        return self.terms.get(tuple(mono), ZERO)

    def depths(self) -> set[HalfInt]:
        return {HalfInt(depth_twice(w)) for w in self.terms}

    def to_json(self) -> list:
        return [{"monomial": monomial_str(w), "coeff": str(c)} for w, c in sorted(self.terms.items())]

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*{monomial_str(w)}" for w, c in sorted(self.terms.items()))

    __repr__ = __str__


def depth_twice(mono: Sequence[Generator]) -> int:
    return -sum(g.twice for g in mono)


def canonical_monomial(word: Sequence[Generator]) -> FockMonomial:
    word = tuple(word)
    for g in word:
        if g.algebra != HC or g.twice >= 0 or g.family == "k":
            raise ValueError(f"{g} is not a creation mode of the Heisenberg-Clifford algebra")
    ordered = tuple(sorted(word, key=order_key))
    if ordered != word:
        raise ValueError(f"{monomial_str(word)} is not in canonical order")
    fermions = [g for g in word if g.parity]
    if len(set(fermions)) != len(fermions):
        raise ValueError("a fermion mode repeats: the monomial vanishes")
    return word


def fock_basis(depth) -> list[FockMonomial]:
    """Canonical monomials of the given depth (in a fixed order)."""
    d = HalfInt.of(depth).twice
    if d < 0:
        return []
    out = []
    for kt in range(d % 2, d + 1, 2):
        rest = (d - kt) // 2
        for k in _strict_odd_parts(kt):
            cs = [Generator("c", -(2 * t - 1)) for t in range(len(k), 0, -1) if k[t - 1]]
            for nb in range(rest + 1):
                for pb in _partitions(nb):
                    bs = [Generator("b", -2 * r) for r in range(len(pb), 0, -1) for _ in range(pb[r - 1])]
                    for pa in _partitions(rest - nb):
                        as_ = [Generator("a", -2 * r) for r in range(len(pa), 0, -1) for _ in range(pa[r - 1])]
                        out.append(tuple(cs + bs + as_))
    return out


def fock_basis_up_to(depth) -> list[FockMonomial]:
    top = HalfInt.of(depth).twice
    return [m for t in range(0, top + 1) for m in fock_basis(HalfInt(t))]


def fock_dimension(n) -> int:
    return len(fock_basis(n))


def _add_into(acc: dict, d: Mapping, q) -> None:
    for w, v in d.items():
        s = acc.get(w)
        s = v * q if s is None else s + v * q
        if s:
            acc[w] = s
        else:
            acc.pop(w, None)


_HALF = Fraction(1, 2)


class FreeFieldModule:
    """A cyclic HC module viewed as a BMS module through the realization above."""

    def __init__(self, spec: HcModuleSpec, params: FfrParams | None = None):
        self.spec = spec
        self.params = params or FfrParams()
        self._hc_cache: dict = {}
        self._ffr_cache: dict = {}
        self._ops: dict = {}

    # Heisenberg-Clifford action

    def hc_on_monomial(self, g: Generator, mono: FockMonomial) -> dict:
        key = (g, mono)
        hit = self._hc_cache.get(key)
        if hit is None:
            hit = self._hc_on_monomial(g, mono)
            self._hc_cache[key] = hit
        return hit

    def _hc_on_monomial(self, g: Generator, mono: FockMonomial) -> dict:
        if g.algebra != HC:
            raise ValueError(f"{g} is not a Heisenberg-Clifford generator")
        if g.family == "k":
            lv = self.spec.level
            return {mono: lv} if lv else {}
        if g.twice < 0:
            if g.parity and g in mono:
                return {}
            pos = bisect_left([order_key(y) for y in mono], order_key(g))
            sign = -1 if g.parity and sum(y.parity for y in mono[:pos]) % 2 else 1
            return {mono[:pos] + (g,) + mono[pos:]: Poly.const(sign)}
        acc: dict = {}
        n_odd = 0
        for idx, y in enumerate(mono):
            for h, v in bracket_terms(g, y):
                # only the central k appears
                coef = self.spec.level * (-v if g.parity and n_odd % 2 else v)
                _add_into(acc, {mono[:idx] + mono[idx + 1:]: coef}, 1)
            n_odd += y.parity
        val = self.spec.cyclic_value(g)
        if val:
            _add_into(acc, {mono: val}, -1 if g.parity and n_odd % 2 else 1)
        return acc

    def hc_act(self, g: Generator, v: FockVector) -> FockVector:
        acc: dict = {}
        for w, coef in v.terms.items():
            _add_into(acc, self.hc_on_monomial(g, w), coef)
        return FockVector(acc)

    # realization

    def operator_terms(self, x: Generator, reach: int) -> list[tuple[Poly, tuple]]:
        """Mode expansion of ``x`` restricted to factors with positive modes <= reach.

        Each entry is (coefficient, factors); factors are applied right to left.
        """
        key = (x, reach)
        hit = self._ops.get(key)
        if hit is None:
            hit = self._operator_terms(x, reach)
            self._ops[key] = hit
        return hit

    def _operator_terms(self, x: Generator, D: int) -> list:
        if x.algebra != BMS:
            raise ValueError(f"{x} is not a BMS generator")
        rho = self.params.rho
        if x.family == "c1":
            return [(self.params.central_charges[0], ())]
        if x.family == "c2":
            return [(self.params.central_charges[1], ())]
        terms: list = []

        def quad(coef, f, g):
            # annihilation-type (larger mode) factor on the right
            if f.twice > g.twice:
                f, g = g, f
                if f.parity and g.parity:
                    coef = -coef
            terms.append((Poly.const(coef), (f, g)))

        if x.family in ("L", "M"):
            n = x.twice // 2
            for p in range(n - D, D + 1):
                if x.family == "L":
                    quad(Fraction(1), a_(p), b_(n - p))
                else:
                    quad(_HALF, b_(p), b_(n - p))
            lin = rho * (-(n + 1))
            terms.append((lin, (a_(n) if x.family == "L" else b_(n),)))
            if x.family == "L":
                for st in range(2 * (n - D) + 1, 2 * D, 2):
                    s = Fraction(st, 2)
                    t = n - s
                    if s == t:
                        continue
                    quad(-_HALF * (s + _HALF), c_(s), c_(t))
        else:  # Q_r
            r = Fraction(x.twice, 2)
            for st in range(x.twice - 2 * D, 2 * D, 2):
                s = Fraction(st, 2)
                quad(Fraction(1), b_(r - s), c_(s))
            terms.append((rho * (-2 * (r + _HALF)), (c_(r),)))
        return [(coef, fs) for coef, fs in terms if coef]

    def reach_for(self, mono: FockMonomial) -> int:
        return max((depth_twice(mono) + 1) // 2, self.spec.reach())

    def ffr_on_monomial(self, x: Generator, mono: FockMonomial) -> dict:
        key = (x, mono)
        hit = self._ffr_cache.get(key)
        if hit is not None:
            return hit
        acc: dict = {}
        for coef, factors in self.operator_terms(x, self.reach_for(mono)):
            cur = {mono: coef}
            for g in reversed(factors):
                nxt: dict = {}
                for w, cw in cur.items():
                    _add_into(nxt, self.hc_on_monomial(g, w), cw)
                cur = nxt
                if not cur:
                    break
            _add_into(acc, cur, 1)
        self._ffr_cache[key] = acc
        return acc

    def ffr_dict(self, x, v: Mapping) -> dict:
        acc: dict = {}
        for g, cg in AlgebraElement.of(x):
            for w, coef in v.items():
                _add_into(acc, self.ffr_on_monomial(g, w), coef * cg)
        return acc

    def ffr_act(self, x, v: FockVector) -> FockVector:
        return FockVector(self.ffr_dict(x, v.terms))


@lru_cache(maxsize=32)
def free_field_module(spec: HcModuleSpec, params: FfrParams) -> FreeFieldModule:
    return FreeFieldModule(spec, params)


def hc_act(x: Generator, v: FockVector, spec: HcModuleSpec) -> FockVector:
    """Action of a Heisenberg-Clifford generator on a Fock vector."""
    return free_field_module(spec, FfrParams()).hc_act(x, v)


def ffr_act(x, v: FockVector, spec: HcModuleSpec, p: FfrParams | None = None,
            degree_cutoff=None) -> FockVector:
    """Action of a BMS generator (or element) through the free-field realization."""
    p = p or FfrParams()
    _check_level_one(spec)
    if degree_cutoff is not None:
        cut = HalfInt.of(degree_cutoff).twice
        if any(depth_twice(w) > cut for w in v.terms):
            raise ValueError(f"vector has depth above the cutoff {HalfInt(cut)}")
    return free_field_module(spec, p).ffr_act(x, v)


def _check_level_one(spec: HcModuleSpec) -> None:
    if spec.level != ONE:
        raise ValueError(f"the realization needs a level-1 module, got level {spec.level}")


# --- commutator verification -------------------------------------------------------


@dataclass
class ResidualReport:
    pair: tuple[str, str]
    cutoff: HalfInt
    max_residual_terms: int
    vectors_checked: int
    central: tuple[str, str]
    failures: list = field(default_factory=list)  # (monomial, residual) samples

    @property
    def ok(self) -> bool:
        return self.max_residual_terms == 0

    def to_json(self) -> dict:
        return {
            "pair": list(self.pair),
            "cutoff": format_rational(self.cutoff.value),
            "max_residual_terms": self.max_residual_terms,
            "central": list(self.central),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ResidualReport":
        return cls(tuple(data["pair"]), HalfInt.of(data["cutoff"]), int(data["max_residual_terms"]),
                   int(data.get("vectors_checked", 0)), tuple(data["central"]))


def _residual(mod: FreeFieldModule, x: Generator, y: Generator, mono, cache: dict) -> dict:
    def image(g):
        key = (g, mono)
        if key not in cache:
            cache[key] = mod.ffr_on_monomial(g, mono)
        return cache[key]

    acc = mod.ffr_dict(x, image(y))
    _add_into(acc, mod.ffr_dict(y, image(x)), -super_sign(x, y))
    for h, v in bracket_terms(x, y):
        _add_into(acc, mod.ffr_on_monomial(h, mono), -v)
    return acc


def commutator_residual(x: Generator, y: Generator, spec: HcModuleSpec,
                        p: FfrParams | None = None, degree_cutoff=2,
                        max_failures: int = 3) -> ResidualReport:
    """Check ffr(x)ffr(y) -+ ffr(y)ffr(x) = ffr([x, y]) on every basis vector of
    depth <= degree_cutoff."""
    p = p or FfrParams()
    _check_level_one(spec)
    cut = HalfInt.of(degree_cutoff)
    for g in (x, y):
        if g.algebra != BMS:
            raise ValueError(f"{g} is not a BMS generator")
        if abs(g.twice) > cut.twice:
            raise ValueError(f"|mode({g})| exceeds the cutoff {cut}")
    mod = free_field_module(spec, p)
    worst = 0
    failures = []
    monos = fock_basis_up_to(cut)
    cache: dict = {}
    for mono in monos:
        res = _residual(mod, x, y, mono, cache)
        if res:
            worst = max(worst, len(res))
            if len(failures) < max_failures:
                failures.append((monomial_str(mono), FockVector(res)))
    c1, c2 = p.central_charges
    return ResidualReport((str(x), str(y)), cut, worst, len(monos), (str(c1), str(c2)), failures)


def residual_suite(generators: Sequence[Generator], spec: HcModuleSpec, p: FfrParams | None = None,
                   degree_cutoff=4, ordered: bool = True) -> list[ResidualReport]:
    """Residual reports for every pair drawn from ``generators``."""
    p = p or FfrParams()
    _check_level_one(spec)
    cut = HalfInt.of(degree_cutoff)
    mod = free_field_module(spec, p)
    monos = fock_basis_up_to(cut)
    c1, c2 = p.central_charges
    images: dict = {}
    reports = []
    for i, x in enumerate(generators):
        for j, y in enumerate(generators):
            if not ordered and j < i:
                continue
            worst = 0
            failures = []
            for mono in monos:
                res = _residual(mod, x, y, mono, images)
                if res:
                    worst = max(worst, len(res))
                    if len(failures) < 3:
                        failures.append((monomial_str(mono), FockVector(res)))
            reports.append(ResidualReport((str(x), str(y)), cut, worst, len(monos),
                                          (str(c1), str(c2)), failures))
    return reports


def suite_generators(max_mode: int) -> list[Generator]:
    gens = [L(n) for n in range(-max_mode, max_mode + 1)]
    gens += [M(n) for n in range(-max_mode, max_mode + 1)]
    gens += [Q(Fraction(t, 2)) for t in range(-2 * max_mode + 1, 2 * max_mode, 2)]
    return gens


def recover_central_charges(spec: HcModuleSpec, p: FfrParams | None = None) -> tuple[Poly, Poly]:
    """Read c1 and c2 off mode commutators on the cyclic vector.

    [L_2, L_-2] - 4 L_0 = c1/2 and [L_2, M_-2] - 4 M_0 = c2/2; only the
    quadratic and linear parts of the realization enter, never the central
    values themselves.
    """
    p = p or FfrParams()
    mod = free_field_module(spec, p)
    vac = {(): ONE}

    def half_central(y, zero):
        acc = mod.ffr_dict(L(2), mod.ffr_dict(y, vac))
        _add_into(acc, mod.ffr_dict(y, mod.ffr_dict(L(2), vac)), -1)
        _add_into(acc, mod.ffr_dict(zero, vac), -4)
        if set(acc) - {()}:
            raise ArithmeticError("commutator is not a multiple of the cyclic vector")
        return acc.get((), ZERO) * 2

    return half_central(L(-2), L(0)), half_central(M(-2), M(0))


# --- highest weight data and simplicity ----------------------------------------------


def character_identity(max_n=4) -> bool:
    top = HalfInt.of(max_n).twice
    return all(fock_dimension(HalfInt(t)) == partition_count(HalfInt(t)) for t in range(top + 1))


def fock_hw_data(a="a", b="b", rho="rho") -> WeightParams:
    """Highest weight of the Fock module F(a, b, rho), read off the realization.

    L_0 and M_0 eigenvalues are computed on the cyclic vector; the central
    charges come from :func:`recover_central_charges`.
    """
    spec = HcModuleSpec.verma(1, a, b)
    p = FfrParams(rho)
    mod = free_field_module(spec, p)
    vac = {(): ONE}
    for g in (L(1), L(2), M(1), M(2), Q(_HALF), Q(Fraction(3, 2))):
        if mod.ffr_dict(g, vac):
            raise ArithmeticError(f"{g} does not kill the cyclic vector")
    h1 = _eigenvalue(mod.ffr_dict(L(0), vac))
    h2 = _eigenvalue(mod.ffr_dict(M(0), vac))
    c1, c2 = recover_central_charges(spec, p)
    if not character_identity(3):
        raise AssertionError("Fock graded dimensions disagree with partition_count")
    return WeightParams(h1, h2, c1, c2)


def _eigenvalue(d: Mapping) -> Poly:
    if set(d) - {()}:
        raise ArithmeticError("cyclic vector is not an eigenvector")
    return d.get((), ZERO)


def fock_violation(b, rho) -> int | None:
    """A nonzero integer n with b + (n-1) rho = 0, if one exists.

    For rho = b = 0 every n qualifies and 1 is returned.
    """
    b, rho = Fraction(b), Fraction(rho)
    if rho == 0:
        return 1 if b == 0 else None
    n = 1 - b / rho
    if n.denominator == 1 and n != 0:
        return int(n)
    return None


def fock_simple(a, b, rho) -> bool:
    """F(a, b, rho) is simple iff b + (n-1) rho != 0 for every nonzero integer n."""
    return fock_violation(b, rho) is None


def hc_whittaker_simple(phi: Mapping[Generator, object] | HcModuleSpec) -> bool:
    val = phi.phi_value(K) if isinstance(phi, HcModuleSpec) else phi.get(K, 0)
    return Fraction(_const(val)) != 0


def fock_whittaker_simple(phi: Mapping[Generator, object] | HcModuleSpec) -> bool:
    val = phi.phi_value(b_(1)) if isinstance(phi, HcModuleSpec) else phi.get(b_(1), 0)
    return Fraction(_const(val)) != 0


def bms_whittaker_simple(phi_k: Mapping[Generator, object], k: int) -> bool:
    """Universal Whittaker module W(phi_k) is simple iff phi_k(M_2k) or phi_k(M_{2k-1}) is nonzero."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    return any(Fraction(_const(phi_k.get(M(m), 0))) != 0 for m in (2 * k, 2 * k - 1))


def _const(x):
    if isinstance(x, Poly):
        return x.constant_value()
    return x


def whittaker_action_table(spec: HcModuleSpec | None = None, rho="rho",
                           max_mode: int = 5) -> list[tuple[str, FockVector]]:
    """Action of positive BMS modes and central elements on w_phi."""
    spec = spec or HcModuleSpec.whittaker()
    p = FfrParams(rho)
    mod = free_field_module(spec, p)
    vac = {(): ONE}
    gens = [L(i) for i in range(1, max_mode + 1)] + [M(i) for i in range(1, max_mode + 1)]
    gens += [Q(Fraction(t, 2)) for t in range(1, 2 * max_mode, 2)] + [C1, C2]
    return [(str(g), FockVector(mod.ffr_dict(g, vac))) for g in gens]


def induced_whittaker_character(spec: HcModuleSpec, rho="rho", k: int = 1) -> dict[Generator, Poly]:
    """Scalars by which M_{2k-1}, M_{2k} act on w_phi (they must act as scalars)."""
    mod = free_field_module(spec, FfrParams(rho))
    out = {}
    for m in (2 * k - 1, 2 * k):
        out[M(m)] = _eigenvalue(mod.ffr_dict(M(m), {(): ONE}))
    return out
