import math
import random

import pytest

from fpselberg.admissible import enumerate_admissible
from fpselberg.errors import (CapacityExceeded, NegativeExponent, NotAllowable,
                              PreconditionViolation)
from fpselberg.gf import FpContext
from fpselberg.integrals import (AllowableTriple, KComposition, ParamPoint,
                                 PCycle, cycle_from_composition, fp_integral,
                                 master_polynomial, selberg_integral,
                                 weight_summands, weighted_integral)
from fpselberg.mpoly import FactorProduct, LinearForm, VarSpace


def test_cycle_targets():
    assert PCycle((1, 1)).targets(5) == (4, 4)
    assert PCycle((2, 3)).targets(7) == (13, 20)
    with pytest.raises(PreconditionViolation):
        PCycle((1, 0))


def test_composition_basics():
    k = KComposition((3, 2))
    assert k.n == 2
    assert (k.part(0), k.part(1), k.part(2), k.part(3)) == (0, 3, 2, 0)
    assert k.num_variables() == 5
    assert k.truncated() == KComposition((3,))
    assert k.is_strictly_decreasing()
    assert not KComposition((2, 2)).is_strictly_decreasing()
    with pytest.raises(PreconditionViolation):
        KComposition((2, 3))
    with pytest.raises(PreconditionViolation):
        KComposition(())


def test_cycle_from_composition():
    assert cycle_from_composition(KComposition((3, 2))).lengths == (1, 1, 1, 3, 3)
    assert cycle_from_composition(KComposition((2, 1))).lengths == (1, 1, 2)
    assert cycle_from_composition(KComposition((3, 2, 1))).lengths == (1, 1, 1, 3, 3, 2)
    assert cycle_from_composition(KComposition((1,))).lengths == (1,)
    assert cycle_from_composition(KComposition((1, 1, 1))).lengths == (1, 1, 1)


def test_param_point_validation():
    pt = ParamPoint(2, (4, 2), 1)
    assert pt.n == 2
    ParamPoint(0, (0, 0), 1)  # shifted points may touch zero
    with pytest.raises(PreconditionViolation):
        ParamPoint(-1, (1,), 1)
    with pytest.raises(PreconditionViolation):
        ParamPoint(1, (1,), 0)


def test_master_polynomial_factor_inventory():
    ctx = FpContext(7)
    k = KComposition((2, 1))
    fp = master_polynomial(k, ParamPoint(1, (2, 5), 3), ctx)
    by_exponent = {}
    for form, e in fp.factors:
        by_exponent.setdefault(e, []).append(form)
    # a=1 on the two first-group vars; b1=2 twice, b2=5 once; 2c=6 once
    # within group 1; p-c=4 on the two cross pairs
    assert len(by_exponent[1]) == 2
    assert len(by_exponent[2]) == 2
    assert len(by_exponent[5]) == 1
    assert len(by_exponent[6]) == 1
    assert len(by_exponent[4]) == 2


def test_master_polynomial_c_equal_p_drops_cross_factors():
    ctx = FpContext(5)
    fp = master_polynomial(KComposition((1, 1)), ParamPoint(1, (1, 1), 5), ctx)
    assert all(len(form.variables()) == 1 for form, _ in fp.factors)


def test_selberg_integral_known_value():
    ctx = FpContext(5)
    got = selberg_integral(KComposition((1, 1)), ParamPoint(1, (3, 2), 2), ctx)
    assert int(got) == 3
    assert int(selberg_integral(KComposition((1,)), ParamPoint(2, (2,), 1), ctx)) == 1


def test_fp_integral_basic_one_variable():
    ctx = FpContext(5)
    space = VarSpace(1)
    cubed = FactorProduct(ctx, space, ((LinearForm.var(0), 3),))
    assert int(fp_integral(cubed, PCycle((1,)), ctx)) == 0  # no x^4 term
    sym = FactorProduct(ctx, space, ((LinearForm.var(0), 2), (LinearForm.one_minus(0), 2)))
    assert int(fp_integral(sym, PCycle((1,)), ctx)) == 1


def test_master_polynomial_two_singleton_groups():
    ctx = FpContext(5)
    fp = master_polynomial(KComposition((1, 1)), ParamPoint(1, (3, 2), 2), ctx)
    forms = {(form, e) for form, e in fp.factors}
    assert forms == {
        (LinearForm.var(0), 1),
        (LinearForm.one_minus(0), 3),
        (LinearForm.diff(1, 0), 3),   # (s - t)^(p-c)
        (LinearForm.one_minus(1), 2),
    }


def test_beta_case_by_hand():
    # single variable: coefficient of x^{p-1} in x^a (1-x)^b is C(b, p-1-a)*(-1)^(p-1-a)
    ctx = FpContext(7)
    space = VarSpace(1)
    for a in range(4):
        fp = FactorProduct(ctx, space, ((LinearForm.var(0), a), (LinearForm.one_minus(0), 6)))
        got = fp_integral(fp, PCycle((1,)), ctx)
        expect = math.comb(6, 6 - a) * (-1) ** (6 - a) % 7
        assert int(got) == expect


def test_fp_integral_dimension_mismatch():
    ctx = FpContext(5)
    fp = FactorProduct(ctx, VarSpace(2), ((LinearForm.var(0), 1),))
    with pytest.raises(PreconditionViolation):
        fp_integral(fp, PCycle((1,)), ctx)
    with pytest.raises(PreconditionViolation):
        fp_integral(fp, PCycle((1, 1)), FpContext(7))


def test_fp_integral_budget(monkeypatch):
    ctx = FpContext(11)
    fp = master_polynomial(KComposition((2, 1)), ParamPoint(1, (1, 1), 1), ctx)
    monkeypatch.setenv("FP_SELBERG_MEM_BUDGET", "100")
    with pytest.raises(CapacityExceeded):
        fp_integral(fp, cycle_from_composition(KComposition((2, 1))), ctx)


def test_group_transposition_symmetry():
    # the integrand is symmetric under permutations inside a variable group,
    # so the extracted coefficient must not move
    rng = random.Random(2)
    ctx = FpContext(5)
    k = KComposition((2, 1))
    cycle = cycle_from_composition(k)
    for _ in range(10):
        pt = ParamPoint(rng.randint(0, 3), (rng.randint(0, 4), rng.randint(0, 4)),
                        rng.randint(1, 2))
        fp = master_polynomial(k, pt, ctx)
        swapped = fp.permuted([1, 0, 2])  # transpose the two group-1 variables
        assert fp_integral(fp, cycle, ctx) == fp_integral(swapped, cycle, ctx)


def test_allowable_triple_check():
    AllowableTriple(1, 1, 1).check(2, 1)
    with pytest.raises(NotAllowable):
        AllowableTriple(2, 0, 0).check(2, 1)
    with pytest.raises(NotAllowable):
        AllowableTriple(0, 2, 0).check(2, 1)
    with pytest.raises(NotAllowable):
        AllowableTriple(1, 1, 2).check(2, 2)
    with pytest.raises(PreconditionViolation):
        AllowableTriple(-1, 0, 0)


def test_weight_summand_equal_groups_and_empty_bottom():
    # k1 = k2 = 1, (0,1,0): the single summand is just (1-t), no s factors
    only, = weight_summands(1, 1, AllowableTriple(0, 1, 0))
    assert only.t_num == () and only.t_one_minus == (0,)
    assert only.s_one_minus == () and only.pairs == ()
    # k2 = 0, (1,0,0): W = t
    only, = weight_summands(1, 0, AllowableTriple(1, 0, 0))
    assert only.t_num == (0,) and only.t_one_minus == ()
    assert only.s_one_minus == () and only.pairs == ()


def test_weighted_integral_equal_group_value():
    ctx = FpContext(5)
    got = weighted_integral(1, 1, AllowableTriple(0, 1, 0), ParamPoint(2, (3, 3), 2), ctx)
    assert int(got) == 3


def test_weight_summand_count_and_structure():
    assert len(weight_summands(2, 1, AllowableTriple(0, 0, 0))) == 2
    assert len(weight_summands(3, 2, AllowableTriple(1, 1, 1))) == 12
    # (l1,l2,m)=(0,1,0) for k=(2,1): no numerator t, all t in 1-t, no s factor
    for s in weight_summands(2, 1, AllowableTriple(0, 1, 0)):
        assert s.t_num == ()
        assert sorted(s.t_one_minus) == [0, 1]
        assert s.s_one_minus == ()
        assert s.pairs == ()
    # (0,0,0): the single s pairs against t_{sigma(1+k1-k2)}
    for s in weight_summands(2, 1, AllowableTriple(0, 0, 0)):
        assert s.s_one_minus == (0,)
        assert len(s.pairs) == 1
        assert s.pairs[0][0] == 0


def test_weighted_integral_requires_two_groups():
    ctx = FpContext(7)
    with pytest.raises(PreconditionViolation):
        weighted_integral(2, 1, AllowableTriple(0, 0, 0), ParamPoint(1, (2,), 1), ctx)


def test_weighted_integral_negative_exponent():
    ctx = FpContext(7)
    # a=0 with l1=0 puts the bare t exponent at a-1 = -1
    with pytest.raises(NegativeExponent):
        weighted_integral(2, 1, AllowableTriple(0, 1, 0), ParamPoint(0, (1, 1), 1), ctx)


def test_weighted_integral_shift_identity():
    # I_{0,k2,0}(a, b1, b2, c) = S(a-1, b1, b2-1, c) on admissible points
    ctx = FpContext(7)
    k = KComposition((2, 1))
    for pt in enumerate_admissible(k, ctx)[:12]:
        lhs = weighted_integral(2, 1, AllowableTriple(0, 1, 0), pt, ctx)
        rhs = selberg_integral(k, ParamPoint(pt.a - 1, (pt.b[0], pt.b[1] - 1), pt.c), ctx)
        assert lhs == rhs
