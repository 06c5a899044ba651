import json
from fractions import Fraction

import pytest

from oracles import ffr_on_verma_oracle, fock_monomials
from superbms.algebra import C1, C2, K, HalfInt, L, M, Q, a, b, c
from superbms.exactnum import ONE, Poly, rank_at
from superbms.freefield import (
    FfrParams,
    FockVector,
    FreeFieldModule,
    HcModuleSpec,
    ResidualReport,
    _residual,
    bms_whittaker_simple,
    canonical_monomial,
    commutator_residual,
    depth_twice,
    ffr_act,
    fock_basis,
    fock_basis_up_to,
    fock_dimension,
    fock_hw_data,
    fock_simple,
    fock_violation,
    fock_whittaker_simple,
    hc_act,
    hc_whittaker_simple,
    induced_whittaker_character,
    recover_central_charges,
    suite_generators,
    whittaker_action_table,
)
from superbms.pbw import partition_count
from superbms.verma import gram_data, verma_simple, violation_level

HALF = Fraction(1, 2)
A, B, RHO = Poly.var("a"), Poly.var("b"), Poly.var("rho")
PA0, PA1, PB0, PB1 = (Poly.var(f"phi_{n}") for n in ("a0", "a1", "b0", "b1"))
VERMA = HcModuleSpec.verma()
WHIT = HcModuleSpec.whittaker()


def fv(text="1"):
    return FockVector.basis(text) if text != "1" else FockVector.cyclic()


def test_hc_action_examples():
    spec = HcModuleSpec.verma(level="k")
    ell = Poly.var("k")
    assert hc_act(a(1), fv("b[-1]"), spec) == fv().scale(ell)
    assert hc_act(c(HALF), fv("c[-1/2]"), spec) == fv().scale(ell)
    assert hc_act(b(1), fv(), WHIT) == fv().scale(PB1)
    assert hc_act(a(0), fv(), VERMA) == fv().scale(A)
    assert hc_act(K, fv("a[-2]"), VERMA) == fv("a[-2]")


def test_hc_action_fermion_signs():
    assert hc_act(c(-HALF), fv("c[-1/2]"), VERMA) == 0
    assert hc_act(c(-HALF), fv("c[-3/2]"), VERMA) == fv("c[-3/2]c[-1/2]").scale(-1)
    assert hc_act(c(Fraction(-3, 2)), fv("c[-1/2]"), VERMA) == fv("c[-3/2]c[-1/2]")
    assert hc_act(c(HALF), fv("c[-3/2]c[-1/2]"), VERMA) == fv("c[-3/2]").scale(-1)
    assert hc_act(c(Fraction(3, 2)), fv("c[-3/2]c[-1/2]b[-1]"), VERMA) == fv("c[-1/2]b[-1]")


def test_hc_action_on_whittaker_commutes_past_creators():
    # a_1 b_{-1} w = b_{-1} a_1 w + w
    assert hc_act(a(1), fv("b[-1]"), WHIT) == fv("b[-1]").scale(PA1) + fv()
    assert hc_act(b(2), fv("a[-2]"), WHIT) == fv().scale(2)


def test_hc_action_rejects_bms():
    with pytest.raises(ValueError):
        hc_act(L(1), fv(), VERMA)
    with pytest.raises(ValueError):
        canonical_monomial((b(-1), c(-HALF)))
    with pytest.raises(ValueError):
        canonical_monomial((a(1),))


def test_realization_examples():
    assert ffr_act(L(0), fv(), VERMA) == fv().scale(A * B - RHO * A)
    assert ffr_act(M(0), fv(), VERMA) == fv().scale(B * B * HALF - RHO * B)
    assert ffr_act(Q(HALF), fv(), WHIT) == fv("c[-1/2]").scale(PB1)
    assert ffr_act(M(2), fv(), WHIT) == fv().scale(PB1 * PB1 * HALF)
    assert ffr_act(C1, fv("a[-1]"), VERMA) == fv("a[-1]").scale(Fraction(5, 2))
    assert ffr_act(C2, fv(), VERMA) == fv().scale(RHO * RHO * -12)


def test_realization_errors():
    with pytest.raises(ValueError):
        ffr_act(a(1), fv(), VERMA)
    with pytest.raises(ValueError):
        ffr_act(L(1), fv(), HcModuleSpec.verma(level=2))
    with pytest.raises(ValueError):
        ffr_act(L(1), fv("a[-3]"), VERMA, degree_cutoff=2)
    with pytest.raises(ValueError):
        HcModuleSpec("whittaker", phi=((a(0), ONE),))


def test_realization_matches_normal_form_oracle():
    mod = FreeFieldModule(VERMA)
    gens = suite_generators(2) + [C1, C2]
    for mono in fock_basis_up_to(2):
        window = (depth_twice(mono) + 1) // 2 + 4
        for x in gens:
            assert mod.ffr_on_monomial(x, mono) == ffr_on_verma_oracle(x, mono, A, B, RHO, window), (x, mono)


def test_grading():
    mod = FreeFieldModule(VERMA)
    for mono in fock_basis_up_to(3):
        for x in suite_generators(3):
            for w in mod.ffr_on_monomial(x, mono):
                assert depth_twice(w) == depth_twice(mono) - x.twice


def test_character():
    for t in range(0, 9):
        n = HalfInt(t)
        assert fock_dimension(n) == partition_count(n)
        got = {tuple(sorted((g.family, g.twice) for g in m)) for m in fock_basis(n)}
        assert got == {tuple(sorted(m)) for m in fock_monomials(t)}
    assert fock_dimension(2) == 6
    assert fock_dimension(3) == 13


@pytest.mark.parametrize("spec", [VERMA, WHIT], ids=["verma", "whittaker"])
@pytest.mark.parametrize("x,y", [(L(1), L(-1)), (Q(HALF), Q(-HALF)), (M(1), M(-1)),
                                 (L(2), Q(Fraction(-3, 2))), (Q(Fraction(3, 2)), Q(-HALF)), (L(-2), M(2))])
def test_commutator_residuals(spec, x, y):
    rep = commutator_residual(x, y, spec, degree_cutoff=2)
    assert rep.ok and rep.max_residual_terms == 0
    assert rep.vectors_checked == sum(partition_count(HalfInt(t)) for t in range(5))


def test_residual_precondition():
    with pytest.raises(ValueError):
        commutator_residual(L(3), L(-3), VERMA, degree_cutoff=2)


def test_q_expansion_is_nonzero():
    v = ffr_act(Q(-HALF), fv(), VERMA)
    assert v == fv("c[-1/2]").scale(B)


class ScaledBilinearQ(FreeFieldModule):
    """Q_r with the bilinear sum multiplied by (r + 1/2)."""

    def _operator_terms(self, x, D):
        terms = super()._operator_terms(x, D)
        if x.family != "Q":
            return terms
        r = Fraction(x.twice, 2)
        return [(coef * (r + HALF) if len(fs) == 2 else coef, fs) for coef, fs in terms]


def test_scaled_bilinear_q_breaks_homomorphism():
    mod = ScaledBilinearQ(VERMA, FfrParams())
    # the bilinear part of Q_{-1/2} vanishes, so [Q_1/2, Q_-1/2] = 2 M_0 fails on |a,b>
    assert mod.ffr_dict(Q(-HALF), {(): ONE}) == {}
    assert _residual(mod, Q(HALF), Q(-HALF), (), {})


def test_central_charges_recovered():
    for spec in (VERMA, WHIT):
        assert recover_central_charges(spec) == (Fraction(5, 2), RHO * RHO * -12)
    assert FfrParams(3).central_charges == (Fraction(5, 2), -108)


def test_highest_weight_data():
    hw = fock_hw_data()
    assert hw.as_tuple() == (A * B - RHO * A, B * B * HALF - RHO * B, Fraction(5, 2), RHO * RHO * -12)
    assert fock_hw_data(1, 2, 1).as_tuple() == (1, 0, Fraction(5, 2), -12)
    assert fock_hw_data(0, 0, "rho").as_tuple() == (0, 0, Fraction(5, 2), RHO * RHO * -12)


def test_simplicity_predicates():
    assert fock_simple(0, 3, 0)
    assert not fock_simple(0, 0, 0)
    assert not fock_simple(0, 2, 1)
    assert fock_violation(2, 1) == -1
    assert fock_simple(5, Fraction(1, 2), 1)
    assert fock_whittaker_simple({b(1): 1})
    assert not fock_whittaker_simple({b(1): 0})
    assert fock_whittaker_simple(HcModuleSpec.whittaker(phi_b1=2))
    assert hc_whittaker_simple({K: 1})
    assert not hc_whittaker_simple({K: 0})
    assert bms_whittaker_simple({M(2): 1}, 1)
    assert bms_whittaker_simple({M(1): 1}, 1)
    assert not bms_whittaker_simple({M(3): 1}, 1)
    assert bms_whittaker_simple({M(3): 1}, 2)
    with pytest.raises(ValueError):
        bms_whittaker_simple({}, 0)


def test_fock_simplicity_matches_verma_determinant():
    grid = [(1, 2, 1), (0, 0, 1), (0, 3, 0), (2, 0, 0), (1, 3, 1), (1, -2, 1), (0, 1, 2),
            (1, Fraction(1, 2), 1), (0, 4, 2), (0, -1, 1), (0, 2, 2)]
    for av, bv, rv in grid:
        hw = fock_hw_data(av, bv, rv)
        h2v, c2v = hw.h2.constant_value(), hw.c2.constant_value()
        # the Verma factors factor as (b + (i-1) rho)(b - (i+1) rho)
        bad = [i for i in range(1, 12)
               if (bv + (i - 1) * rv) * (bv - (i + 1) * rv) == 0]
        assert set(bad[:11]) == set(verma_simple(h2v, c2v, max_i=11).violations)
        first = min((violation_level(i).twice for i in bad), default=None)
        assert fock_simple(av, bv, rv) == (not bad)
        for t in range(0, 5):
            g = gram_data(HalfInt(t))
            pt = {"h1": hw.h1.constant_value(), "h2": h2v, "c1": hw.c1.constant_value(), "c2": c2v}
            full = rank_at(g.gram, pt) == len(g.basis)
            assert full == (first is None or t < first), (av, bv, rv, t)


def test_whittaker_table():
    table = dict(whittaker_action_table(max_mode=5))
    w = fv()
    assert table["L[1]"] == w.scale(PA0 * PB1 + PA1 * PB0 - RHO * PA1 * 2)
    assert table["L[2]"] == w.scale(PA1 * PB1)
    assert table["M[1]"] == w.scale((PB0 - RHO * 2) * PB1)
    assert table["M[2]"] == w.scale(PB1 * PB1 * HALF)
    assert table["Q[1/2]"] == fv("c[-1/2]").scale(PB1)
    for i in range(3, 6):
        assert table[f"L[{i}]"] == 0 and table[f"M[{i}]"] == 0
    for r in ("3/2", "5/2", "7/2", "9/2"):
        assert table[f"Q[{r}]"] == 0
    assert table["c1"] == w.scale(Fraction(5, 2))
    assert table["c2"] == w.scale(RHO * RHO * -12)


def test_induced_whittaker_character():
    chi = induced_whittaker_character(WHIT)
    assert chi[M(2)] == PB1 * PB1 * HALF
    assert chi[M(1)] == (PB0 - RHO * 2) * PB1


def test_residual_report_json_round_trip():
    rep = commutator_residual(Q(HALF), Q(-HALF), VERMA, degree_cutoff=2)
    data = json.loads(json.dumps(rep.to_json()))
    assert data == {"pair": ["Q[1/2]", "Q[-1/2]"], "cutoff": "2", "max_residual_terms": 0,
                    "central": ["5/2", "-12*rho^2"]}
    back = ResidualReport.from_json(data)
    assert back.to_json() == data


def test_fock_vector_text():
    v = fv("c[-1/2]b[-1]").scale(RHO) + fv()
    assert v.coefficient("c[-1/2]b[-1]") == RHO
    assert v.depths() == {HalfInt(0), HalfInt(3)}
    assert [t["monomial"] for t in v.to_json()] == ["1", "c[-1/2]b[-1]"]
