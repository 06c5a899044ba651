"""Exact rationals, sparse multivariate polynomials and a little exact linear algebra.

Every polynomial lives over the same fixed, ordered list of variables
(:data:`VARIABLES`), so exponent vectors are plain tuples and two polynomials
can be compared and serialized without any variable bookkeeping.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Rational = Fraction

VARIABLES: tuple[str, ...] = (
    "h1", "h2", "c1", "c2", "rho", "a", "b", "k",
    "phi_a0", "phi_a1", "phi_b0", "phi_b1",
)
NVARS = len(VARIABLES)
_VAR_INDEX = {name: i for i, name in enumerate(VARIABLES)}
_ZERO_EXP = (0,) * NVARS

Scalar = Union[int, Fraction]


def parse_rational(text: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"`` (optionally signed) into a reduced Fraction."""
    s = text.strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", s):
        raise ValueError(f"malformed rational: {text!r}")
    num, _, den = s.partition("/")
    if den and int(den) == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def format_rational(q: Scalar) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _gradlex_key(exps: tuple[int, ...]):
    return (sum(exps), exps)


class Poly:
    """Immutable sparse polynomial with Fraction coefficients.

    ``terms`` maps exponent tuples (one entry per name in :data:`VARIABLES`)
    to nonzero coefficients.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, ...], Scalar] | None = None):
        clean = {}
        if terms:
            for e, c in terms.items():
                if len(e) != NVARS:
                    raise ValueError("exponent vector has wrong length")
                if c:
                    clean[tuple(e)] = Fraction(c)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        # trusted constructor: terms already clean
        p = object.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, value: Scalar) -> "Poly":
        value = Fraction(value)
        return cls._raw({_ZERO_EXP: value} if value else {})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "Poly":
        try:
            idx = _VAR_INDEX[name]
        except KeyError:
            raise ValueError(f"unknown variable {name!r}; expected one of {VARIABLES}") from None
        e = [0] * NVARS
        e[idx] = power
        return cls._raw({tuple(e): Fraction(1)})

    @staticmethod
    def coerce(x) -> "Poly":
        if isinstance(x, Poly):
            return x
        if isinstance(x, (int, Fraction)):
            return Poly.const(x)
        if isinstance(x, str):
            return Poly.parse(x)
        raise TypeError(f"cannot convert {type(x).__name__} to Poly")

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and _ZERO_EXP in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"polynomial {self} is not constant")
        return self._terms.get(_ZERO_EXP, Fraction(0))

    def variables(self) -> set[str]:
        used = set()
        for e in self._terms:
            for i, x in enumerate(e):
                if x:
                    used.add(VARIABLES[i])
        return used

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def leading_term(self) -> tuple[tuple[int, ...], Fraction]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self._terms, key=_gradlex_key)
        return e, self._terms[e]

    # arithmetic

    def __add__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                other = Poly.const(other)
            else:
                return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v += c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                other = Poly.const(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, q: Scalar) -> "Poly":
        if not q:
            return ZERO
        if q == 1:
            return self
        q = Fraction(q)
        return Poly._raw({e: c * q for e, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return ZERO
        if len(a) == 1 and _ZERO_EXP in a:
            return other.scale(a[_ZERO_EXP])
        if len(b) == 1 and _ZERO_EXP in b:
            return self.scale(b[_ZERO_EXP])
        out: dict = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Poly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def exact_div(self, other: "Poly") -> "Poly":
        """Quotient ``self / other``; raises ArithmeticError unless the division is exact."""
        other = Poly.coerce(other)
        if not other._terms:
            raise ZeroDivisionError("division by the zero polynomial")
        if other.is_constant():
            return self.scale(1 / other.constant_value())
        lead_e, lead_c = other.leading_term()
        rem = dict(self._terms)
        quot: dict = {}
        while rem:
            e = max(rem, key=_gradlex_key)
            shift = tuple(x - y for x, y in zip(e, lead_e))
            if min(shift) < 0:
                raise ArithmeticError(f"{other} does not divide {self}")
            q = rem[e] / lead_c
            quot[shift] = q
            for e2, c2 in other._terms.items():
                t = tuple(x + y for x, y in zip(shift, e2))
                v = rem.get(t, 0) - q * c2
                if v:
                    rem[t] = v
                else:
                    rem.pop(t, None)
        return Poly._raw(quot)

    def subs(self, assignment: Mapping[str, Scalar]) -> "Poly":
        """Partial specialization: substitute the given variables, keep the rest."""
        idx = [(_VAR_INDEX[name], Fraction(v)) for name, v in assignment.items()]
        out: dict = {}
        for e, c in self._terms.items():
            e2 = list(e)
            for i, v in idx:
                if e2[i]:
                    c = c * v ** e2[i]
                    e2[i] = 0
            if not c:
                continue
            t = tuple(e2)
            s = out.get(t, 0) + c
            if s:
                out[t] = s
            else:
                out.pop(t, None)
        return Poly._raw(out)

    def eval(self, assignment: Mapping[str, Scalar]) -> Fraction:
        return poly_eval(self, assignment)

    # comparison / hashing

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Poly.const(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # text / json

    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda t: _gradlex_key(t[0]), reverse=True)

    def __str__(self):
        if not self._terms:
            return "0"
        pieces = []
        for n, (e, c) in enumerate(self.sorted_terms()):
            mono = "*".join(
                VARIABLES[i] if x == 1 else f"{VARIABLES[i]}^{x}"
                for i, x in enumerate(e) if x
            )
            mag = abs(c)
            if not mono:
                body = format_rational(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{format_rational(mag)}*{mono}"
            if n == 0:
                pieces.append(body if c > 0 else "-" + body)
            else:
                pieces.append((" + " if c > 0 else " - ") + body)
        return "".join(pieces)

    def __repr__(self):
        return f"Poly({str(self)!r})"

    _TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+)")

    @classmethod
    def parse(cls, text: str) -> "Poly":
        """Inverse of ``str``; accepts the canonical text form."""
        s = text.strip()
        if not s:
            raise ValueError("empty polynomial text")
        total = ZERO
        pos = 0
        while pos < len(s):
            m = cls._TERM_RE.match(s, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse polynomial {text!r}")
            sign, body = m.group(1), m.group(2).strip()
            pos = m.end()
            term = ONE
            for factor in body.split("*"):
                factor = factor.strip()
                if re.fullmatch(r"\d+(/\d+)?", factor):
                    term = term * parse_rational(factor)
                    continue
                name, _, power = factor.partition("^")
                if name not in _VAR_INDEX or (power and not power.isdigit()):
                    raise ValueError(f"bad factor {factor!r} in {text!r}")
                term = term * Poly.var(name, int(power) if power else 1)
            total = total + (-term if sign == "-" else term)
        return total

    def to_json(self) -> list:
        return [
            {"coeff": format_rational(c),
             "exps": {VARIABLES[i]: x for i, x in enumerate(e) if x}}
            for e, c in self.sorted_terms()
        ]

    @classmethod
    def from_json(cls, data: Iterable[Mapping]) -> "Poly":
        terms = {}
        for item in data:
            e = [0] * NVARS
            for name, x in item["exps"].items():
                if name not in _VAR_INDEX:
                    raise ValueError(f"unknown variable {name!r}")
                e[_VAR_INDEX[name]] = int(x)
            terms[tuple(e)] = parse_rational(item["coeff"])
        return cls(terms)


ZERO = Poly._raw({})
ONE = Poly._raw({_ZERO_EXP: Fraction(1)})


def poly_eval(p: Poly, assignment: Mapping[str, Scalar]) -> Fraction:
    """Exact value of ``p`` at a point; every variable of ``p`` must be assigned."""
    missing = sorted(p.variables() - set(assignment), key=_VAR_INDEX.get)
    if missing:
        raise KeyError(f"assignment is missing variable {missing[0]!r}")
    values = [Fraction(assignment[name]) if name in assignment else None for name in VARIABLES]
    total = Fraction(0)
    for e, c in p.items():
        term = c
        for i, x in enumerate(e):
            if x:
                term *= values[i] ** x
        total += term
    return total


class PolyMatrix:
    """Dense, immutable rectangular matrix of :class:`Poly` entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence]):
        rows = [tuple(Poly.coerce(x) for x in row) for row in entries]
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        self.entries: tuple[tuple[Poly, ...], ...] = tuple(rows)
        self.rows = len(rows)
        self.cols = len(rows[0]) if rows else 0

    @classmethod
    def identity(cls, n: int) -> "PolyMatrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.entries == other.entries

    def __repr__(self):
        return f"PolyMatrix({[[str(x) for x in r] for r in self.entries]})"

    def is_square(self) -> bool:
        return self.rows == self.cols

    def diagonal(self) -> list[Poly]:
        return [self.entries[i][i] for i in range(min(self.rows, self.cols))]

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def is_lower_triangular(self) -> bool:
        return all(not self.entries[i][j] for i in range(self.rows) for j in range(i + 1, self.cols))

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            self.entries[i][j] == self.entries[j][i]
            for i in range(self.rows) for j in range(i + 1, self.cols)
        )

    def evaluate(self, assignment: Mapping[str, Scalar]) -> list[list[Fraction]]:
        return [[poly_eval(x, assignment) for x in row] for row in self.entries]

    def to_strings(self) -> list[list[str]]:
        return [[str(x) for x in row] for row in self.entries]


def det_fraction_free(m: PolyMatrix) -> Poly:
    """Determinant by Bareiss elimination; every division is exact."""
    if not m.is_square():
        raise ValueError(f"determinant of a non-square {m.rows}x{m.cols} matrix")
    n = m.rows
    if n == 0:
        return ONE
    a = [list(row) for row in m.entries]
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if not a[k][k]:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return ZERO
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]).exact_div(prev)
            a[i][k] = ZERO
        prev = pivot
    return a[n - 1][n - 1] if sign > 0 else -a[n - 1][n - 1]


def rational_row_echelon(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q. Returns (matrix, pivot columns)."""
    a = [list(map(Fraction, r)) for r in rows]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rational_rank(rows: list[list[Fraction]]) -> int:
    if not rows or not rows[0]:
        return 0
    return len(rational_row_echelon(rows)[1])


def rational_det(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    a = [list(map(Fraction, r)) for r in rows]
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def rational_nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : rows . x = 0}, one vector per free column."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    rref, pivots = rational_row_echelon(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            x[pc] = -rref[r][f]
        basis.append(x)
    return basis


def rank_at(m: PolyMatrix, assignment: Mapping[str, Scalar]) -> int:
    """Rank of ``m`` after substituting ``assignment`` (which must cover every variable)."""
    return rational_rank(m.evaluate(assignment))
