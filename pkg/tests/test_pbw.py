from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import lowering_words
from superbms.algebra import C1, C2, K, HalfInt, L, M, Q, a, b, c
from superbms.exactnum import ONE, Poly
from superbms.pbw import (
    IndexTriple,
    UEAElement,
    compare,
    degree,
    generators_up_to,
    is_canonical,
    length,
    monomial_str,
    normal_form,
    parse_monomial,
    partition_count,
    star_dual,
    uea_degree,
    weight_basis,
)

HALF = Fraction(1, 2)


def uea(*terms):
    return UEAElement([(tuple(w), q) for w, q in terms])


def words(bound=4, max_len=5):
    gens = generators_up_to(bound)
    return st.lists(st.sampled_from(gens), max_size=max_len)


def test_single_swap():
    assert normal_form([L(1), L(-1)]) == uea(([L(-1), L(1)], 1), ([L(0)], 2))


def test_odd_square():
    assert normal_form([Q(-HALF), Q(-HALF)]) == uea(([M(-1)], 1))


def test_raising_through_two_lowering():
    expected = uea(([M(-1), M(-1), L(1)], 1), ([M(-1), M(0)], 4))
    assert normal_form([L(1), M(-1), M(-1)]) == expected


def test_central_and_zero_mode_placement():
    nf = normal_form([L(2), L(-2)])
    assert nf == uea(([L(-2), L(2)], 1), ([L(0)], 4), ([C1], HALF))
    assert normal_form([Q(Fraction(3, 2)), Q(Fraction(-3, 2))]) == uea(
        ([Q(Fraction(-3, 2)), Q(Fraction(3, 2))], -1), ([M(0)], 2), ([C2], Fraction(2, 3)))


def test_hc_normal_form():
    assert normal_form([a(1), b(-1)]) == uea(([b(-1), a(1)], 1), ([K], 1))
    assert normal_form([c(HALF), c(-HALF)]) == uea(([c(-HALF), c(HALF)], -1), ([K], 1))


def test_coefficients_in_words():
    h1 = Poly.var("h1")
    assert normal_form([(h1, L(1)), (2, L(-1))]) == uea(([L(-1), L(1)], h1 * 2), ([L(0)], h1 * 4))


def test_mixed_word_rejected():
    with pytest.raises(ValueError):
        normal_form([L(1), a(-1)])


@settings(max_examples=200)
@given(words())
def test_rewriting_confluence(word):
    left = normal_form(word, strategy="leftmost")
    right = normal_form(word, strategy="rightmost")
    assert left == right
    for w, _ in left:
        assert is_canonical(w)


@settings(max_examples=100)
@given(words())
def test_weight_and_parity_preserved(word):
    deg = sum(g.twice for g in word if not g.is_central())
    par = sum(g.parity for g in word) % 2
    for w, _ in normal_form(word):
        assert sum(g.twice for g in w if not g.is_central()) == deg
        assert sum(g.parity for g in w) % 2 == par


@settings(max_examples=60)
@given(words(2, 3), words(2, 3), words(2, 3))
def test_product_is_associative(x, y, z):
    X, Y, Z = normal_form(x), normal_form(y), normal_form(z)
    assert (X * Y) * Z == X * (Y * Z)


def test_listed_bases():
    assert [str(t) for t in weight_basis(2)] == [
        "M[-1]^2", "M[-2]", "M[-1]L[-1]", "Q[-3/2]Q[-1/2]", "L[-2]", "L[-1]^2"]
    assert [str(t) for t in weight_basis("3/2")] == ["Q[-1/2]M[-1]", "Q[-3/2]", "Q[-1/2]L[-1]"]
    assert [str(t) for t in weight_basis(0)] == ["1"]
    assert weight_basis(-1) == []


def test_partition_counts():
    assert partition_count(0) == 1
    assert partition_count(2) == 6
    assert partition_count(3) == 13
    for t in range(0, 13):
        n = HalfInt(t)
        assert partition_count(n) == len(weight_basis(n)) == len(lowering_words(t))


def test_weight_basis_matches_brute_force():
    for t in range(0, 9):
        got = {tuple(sorted((g.family, g.twice) for g in b_.word())) for b_ in weight_basis(HalfInt(t))}
        assert got == lowering_words(t)


def test_monomial_text_round_trip():
    w = (Q(Fraction(-3, 2)), Q(-HALF), M(-2), L(-1), L(-1))
    assert monomial_str(w) == "Q[-3/2]Q[-1/2]M[-2]L[-1]^2"
    assert parse_monomial("Q[-3/2]Q[-1/2]M[-2]L[-1]^2") == w
    assert monomial_str(()) == "1"
    assert parse_monomial("1") == ()
    for t in range(0, 9):
        for x in weight_basis(HalfInt(t)):
            assert IndexTriple.parse(str(x)) == x
            assert IndexTriple.from_word(x.word()) == x


def test_index_triple_conventions():
    t = IndexTriple.parse("Q[-3/2]M[-2]L[-1]^2")
    assert t.i == (2,) and t.j == (0, 1) and t.k == (0, 1)
    assert t.weight == HalfInt.of("11/2")
    assert length(t) == t.weight
    with pytest.raises(ValueError):
        IndexTriple((), (), (2,))


def test_star_dual():
    assert str(star_dual(IndexTriple.parse("M[-1]^2"))) == "L[-1]^2"
    assert str(star_dual(IndexTriple.parse("M[-1]L[-1]"))) == "M[-1]L[-1]"
    assert str(star_dual(IndexTriple.parse("Q[-3/2]Q[-1/2]"))) == "Q[-3/2]Q[-1/2]"
    for t in range(0, 9):
        basis = weight_basis(HalfInt(t))
        assert sorted(map(str, map(star_dual, basis))) == sorted(map(str, basis))
        for x in basis:
            assert star_dual(star_dual(x)) == x
            assert star_dual(x).weight == x.weight


def test_order_examples():
    m2 = IndexTriple.parse("M[-2]")
    m1l1 = IndexTriple.parse("M[-1]L[-1]")
    assert compare("principal_Sn", m2, m1l1) == 1
    # tuples are stored from i_1 upwards: (..., 0, 2, 1) is (1, 2)
    assert compare("lex_gt", (1, 2), (3, 1)) == 1
    short = IndexTriple.parse("L[-1]")
    long_ = IndexTriple.parse("Q[-1/2]L[-1]")
    assert compare("principal_induced", short, long_) == -1
    assert compare("revlex", (1, 0), (0, 1)) == 1


def test_order_errors():
    with pytest.raises(TypeError):
        compare("lex_gt", IndexTriple.parse("L[-1]"), (1,))
    with pytest.raises(TypeError):
        compare("principal_Sn", (1,), (2,))
    with pytest.raises(ValueError):
        compare("bogus", (1,), (2,))


@pytest.mark.parametrize("order", ["principal_Sn", "principal_induced"])
def test_principal_orders_are_total(order):
    for t in range(0, 7):
        basis = weight_basis(HalfInt(t))
        if order == "principal_induced":
            basis = [x for s in range(0, t + 1) for x in weight_basis(HalfInt(s))]
        for x, y in product(basis, repeat=2):
            cxy = compare(order, x, y)
            assert cxy == -compare(order, y, x)
            assert (cxy == 0) == (x == y)
        for x, y, z in product(basis, repeat=3):
            if compare(order, x, y) > 0 and compare(order, y, z) > 0:
                assert compare(order, x, z) > 0


vectors = st.lists(st.integers(0, 3), max_size=4).map(tuple)


@pytest.mark.parametrize("order", ["lex_gt", "revlex"])
@given(x=vectors, y=vectors, z=vectors)
def test_vector_orders_are_total(order, x, y, z):
    strip = lambda v: tuple(v[: max([i + 1 for i, e in enumerate(v) if e] or [0])])
    assert compare(order, x, y) == -compare(order, y, x)
    assert (compare(order, x, y) == 0) == (strip(x) == strip(y))
    if compare(order, x, y) > 0 and compare(order, y, z) > 0:
        assert compare(order, x, z) > 0


def test_degree_picks_induced_maximum():
    support = [IndexTriple.parse("L[-1]"), IndexTriple.parse("Q[-1/2]L[-1]"), IndexTriple.parse("M[-1]")]
    assert degree(support) == IndexTriple.parse("Q[-1/2]L[-1]")
    with pytest.raises(ValueError):
        degree([])


def test_uea_degree():
    assert uea_degree(normal_form([L(2), M(-1)])) == HalfInt(2)
    with pytest.raises(ValueError):
        uea_degree(normal_form([L(1)]) + normal_form([L(2)]))
    assert uea_degree(UEAElement([((C1,), ONE)])) == HalfInt(0)
