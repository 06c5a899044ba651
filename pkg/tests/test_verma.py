import json
import random
from fractions import Fraction

import pytest

from oracles import cofactor_det, form_via_normal_form
from superbms.algebra import HalfInt, L, M, Q
from superbms.exactnum import ONE, ZERO, Poly, rank_at
from superbms.pbw import IndexTriple, normal_form, weight_basis
from superbms.verma import (
    GramData,
    VermaVector,
    WeightParams,
    act,
    contravariant_form,
    det_identity_at,
    det_identity_symbolic,
    diagonal_closed_form,
    diagonal_report,
    gram_data,
    is_singular,
    naive_diagonal_product,
    singular_vectors,
    vacuum_simple,
    verma_simple,
    violation_level,
)

HALF = Fraction(1, 2)
h1, h2, c1, c2 = WeightParams.symbolic().as_tuple()


def vec(text):
    return VermaVector.basis(text)


def levels(top_twice):
    return [HalfInt(t) for t in range(0, top_twice + 1)]


def test_action_examples():
    one = vec("1")
    assert act(L(1), vec("M[-1]")) == one.scale(h2 * 2)
    assert act(M(1), vec("M[-1]")) == 0
    # L1 L-1 L-1 = L-1 L-1 L1 + 2 L-1 L0 + 2 L0 L-1, and L0 L-1 1 = (h1 + 1) L-1 1
    assert act(L(1), vec("L[-1]^2")) == vec("L[-1]").scale(h1 * 4 + 2)
    assert act(L(0), vec("Q[-1/2]L[-1]")) == vec("Q[-1/2]L[-1]").scale(h1 + Fraction(3, 2))
    assert act(M(0), vec("L[-1]")) == vec("L[-1]").scale(h2) + vec("M[-1]")


def test_action_of_enveloping_elements():
    x = normal_form([L(1), L(1)])
    assert act(x, vec("L[-1]^2")) == act(L(1), act(L(1), vec("L[-1]^2")))


def test_form_examples():
    assert contravariant_form(vec("Q[-1/2]"), vec("Q[-1/2]")) == h2 * 2
    assert contravariant_form(vec("L[-1]"), vec("L[-1]")) == h1 * 2
    assert contravariant_form(vec("M[-1]"), vec("M[-1]")) == ZERO


def test_level_one_gram():
    g = gram_data(1)
    assert [str(t) for t in g.basis] == ["M[-1]", "L[-1]"]
    assert g.gram.to_strings() == [["0", "2*h2"], ["2*h2", "2*h1"]]


def test_gram_matches_normal_form_oracle():
    for n in levels(4):
        g = gram_data(n)
        for r, u in enumerate(g.basis):
            for s, v in enumerate(g.basis):
                assert g.gram[r, s] == form_via_normal_form(u.word(), v.word(), h1, h2, c1, c2)


def test_form_is_symmetric():
    for n in levels(5):
        assert gram_data(n).gram.is_symmetric()


def test_form_is_contravariant():
    ops = [L(1), L(-1), L(2), L(-2), M(1), M(-1), Q(HALF), Q(-HALF), Q(Fraction(3, 2)), Q(Fraction(-3, 2))]
    from superbms.algebra import bar
    for x in ops:
        for n in levels(4):
            m = n + HalfInt(x.twice)
            if m.twice < 0 or m.twice > 4:
                continue
            for u in weight_basis(m):
                for v in weight_basis(n):
                    lhs = contravariant_form(act(x, vec(str(v))), vec(str(u)))
                    rhs = contravariant_form(vec(str(v)), act(bar(x), vec(str(u))))
                    assert lhs == rhs, (x, u, v)


def test_dmat_is_lower_triangular():
    for n in levels(6):
        assert gram_data(n).dmat.is_lower_triangular(), n


def test_diagonals_at_low_levels():
    sq = h2 * h2
    assert gram_data("1/2").diagonal() == [h2 * 2]
    assert gram_data(1).diagonal() == [h2 * 2, h2 * 2]
    assert gram_data("3/2").diagonal() == [sq * 4, h2 * 2 + c2 * Fraction(2, 3), sq * 4]
    assert gram_data(2).diagonal() == [
        sq * 8, h2 * 4 + c2 * HALF, sq * 4, h2 * 2 * (h2 * 2 + c2 * Fraction(2, 3)), h2 * 4 + c2 * HALF, sq * 8]


def test_closed_form_diagonal():
    for n in levels(6):
        for entry in diagonal_report(n):
            assert entry.closed_form == entry.computed


def test_naive_product_discrepancies():
    # without multiplicity factorials the doubled L[-1] gives 4 h2^2, not 8 h2^2
    t = IndexTriple.parse("L[-1]^2")
    assert naive_diagonal_product(t, fermion_index="mode") == h2 * h2 * 4
    assert diagonal_closed_form(t) == h2 * h2 * 8
    # position-indexed fermion factor at Q[-3/2] gives 5/4 c2 instead of 2/3 c2
    q = IndexTriple.parse("Q[-3/2]")
    assert naive_diagonal_product(q) == h2 * 2 + c2 * Fraction(5, 4)
    assert naive_diagonal_product(q, fermion_index="mode") == h2 * 2 + c2 * Fraction(2, 3)
    for n in levels(6):
        for entry in diagonal_report(n):
            if all(e <= 1 for e in entry.basis.i + entry.basis.j):
                assert naive_diagonal_product(entry.basis, fermion_index="mode") == entry.computed


def test_determinant_identity_symbolic():
    for n in levels(4):
        ok, det, prod = det_identity_symbolic(n)
        assert ok and det == prod
    g = gram_data("3/2")
    assert g.det() == cofactor_det([list(r) for r in g.gram.entries])


def test_determinant_identity_at_points():
    rng = random.Random(7)
    for n in levels(7):
        for _ in range(3):
            pt = {k: Fraction(rng.randint(-9, 9), rng.randint(1, 6)) for k in ("h1", "h2", "c1", "c2")}
            ok, det, prod = det_identity_at(n, pt)
            assert ok and det == prod


def test_verma_simple_examples():
    assert verma_simple(1, 0).simple
    assert verma_simple(0, 3).violations == (1,)
    assert verma_simple(-1, 8).violations == (2,)
    assert not verma_simple(0, 0).simple
    assert verma_simple(0, 0, max_i=5).violations == (1, 2, 3, 4, 5)
    assert verma_simple(5, 7).simple
    with pytest.raises(ValueError):
        verma_simple(1, 1, max_i=0)


def test_violation_level():
    assert violation_level(1) == HalfInt.of("1/2")
    assert violation_level(2) == HalfInt(4)
    assert violation_level(3) == HalfInt.of("3/2")


def test_vacuum_simple():
    assert vacuum_simple(1)
    assert not vacuum_simple(0)
    assert vacuum_simple(Fraction(-16, 3))


def rank_profile(h2v, c2v, top_twice, h1v=Fraction(3, 7), c1v=Fraction(2)):
    out = []
    for n in levels(top_twice):
        g = gram_data(n)
        r = rank_at(g.gram, {"h1": h1v, "h2": h2v, "c1": c1v, "c2": c2v})
        out.append(r == len(g.basis))
    return out


@pytest.mark.parametrize("h2v,c2v", [(0, 5), (-1, 8), (5, 7), (1, 0), (Fraction(-1, 3), 8), (0, 0),
                                     (Fraction(1, 24), -1), (-3, Fraction(9, 2))])
def test_gram_rank_agrees_with_criterion(h2v, c2v):
    rep = verma_simple(h2v, c2v, max_i=10)
    full = rank_profile(h2v, c2v, 5)
    first_bad = min((violation_level(i).twice for i in rep.violations), default=None)
    for t, ok in enumerate(full):
        assert ok == (first_bad is None or t < first_bad), (t, first_bad)


def test_singular_vectors():
    p = WeightParams.numeric(0, 0, 1, 1)
    sv = singular_vectors("1/2", p)
    assert sv == [vec("Q[-1/2]")]
    assert vec("M[-1]") in singular_vectors(1, p)
    assert not is_singular(vec("L[-1]"), p)
    assert is_singular(vec("M[-1]"), p)
    assert singular_vectors("1/2", WeightParams.numeric(1, 5, 1, 7)) == []
    with pytest.raises(ValueError):
        singular_vectors(1, WeightParams.symbolic())
    with pytest.raises(ValueError):
        singular_vectors(2, p, mode_cutoff=2)


def test_singular_vectors_are_killed():
    p = WeightParams.numeric(0, -1, 3, 8)
    for v in singular_vectors(2, p):
        assert is_singular(v, p, mode_cutoff=4)


def test_negative_levels_are_empty():
    assert gram_data(-1).basis == []
    assert singular_vectors(-1, WeightParams.numeric(0, 0, 0, 0)) == []


def test_gram_json_round_trip():
    for n in levels(4):
        g = gram_data(n)
        data = json.loads(json.dumps(g.to_json()))
        back = GramData.from_json(data)
        assert back.level == g.level and back.basis == g.basis
        assert back.gram == g.gram and back.dmat == g.dmat
        assert back.to_json() == data
    assert gram_data(2).to_json()["level"] == "2"
    assert gram_data("3/2").to_json()["level"] == "3/2"


def test_numeric_params_reduce_symbolic():
    pt = {"h1": Fraction(1, 2), "h2": Fraction(-2), "c1": Fraction(3), "c2": Fraction(5, 2)}
    sym = gram_data(2)
    num = gram_data(2, WeightParams.numeric(*pt.values()))
    assert num.gram == sym.gram.evaluate(pt) or [[Poly.const(x) for x in r] for r in sym.gram.evaluate(pt)] == [
        list(r) for r in num.gram.entries]
    assert ONE == Poly.const(1)
