import random

import pytest
from hypothesis import given, settings, strategies as st

from fpselberg.errors import (CapacityExceeded, IndexOutOfCaps, InvalidExponent,
                              PreconditionViolation)
from fpselberg.gf import FpContext
from fpselberg.mpoly import (FactorProduct, LinearForm, TruncatedPoly, VarSpace,
                             derivative, expand, extract_coefficient, multiply,
                             slot_budget, sparse_expand_oracle)


def test_linear_form_constructors():
    assert LinearForm.var(2) == LinearForm(0, ((2, 1),))
    assert LinearForm.one_minus(0) == LinearForm(1, ((0, -1),))
    assert LinearForm.diff(1, 3) == LinearForm(0, ((1, 1), (3, -1)))
    assert LinearForm.diff(1, 3).variables() == (1, 3)


def test_linear_form_validation():
    with pytest.raises(PreconditionViolation):
        LinearForm(0, ((0, 1), (1, 1), (2, 1)))
    with pytest.raises(PreconditionViolation):
        LinearForm(0, ((1, 1), (1, -1)))
    with pytest.raises(PreconditionViolation):
        LinearForm(0, ((-1, 1),))


def test_factor_product_validation():
    ctx = FpContext(5)
    space = VarSpace(2)
    with pytest.raises(InvalidExponent):
        FactorProduct(ctx, space, ((LinearForm.var(0), -1),))
    with pytest.raises(PreconditionViolation):
        FactorProduct(ctx, space, ((LinearForm.var(5), 1),))


def test_expand_single_binomial():
    # (1 - x)^3 = 1 - 3x + 3x^2 - x^3 mod 5
    ctx = FpContext(5)
    fp = FactorProduct(ctx, VarSpace(1), ((LinearForm.one_minus(0), 3),))
    poly = expand(fp, (3,))
    got = [int(poly.coefficient((i,))) for i in range(4)]
    assert got == [1, 2, 3, 4]
    sq = expand(FactorProduct(ctx, VarSpace(1), ((LinearForm.one_minus(0), 2),)), (2,))
    assert [int(sq.coefficient((i,))) for i in range(3)] == [1, 3, 1]


def test_multiply_small_products():
    ctx = FpContext(5)
    one_minus = expand(FactorProduct(ctx, VarSpace(1), ((LinearForm.one_minus(0), 1),)), (2,))
    one_plus = expand(FactorProduct(ctx, VarSpace(1), ((LinearForm(1, ((0, 1),)), 1),)), (2,))
    prod = multiply(one_minus, one_plus)  # 1 - x^2
    assert [int(prod.coefficient((i,))) for i in range(3)] == [1, 0, 4]
    ctx7 = FpContext(7)
    sq = expand(FactorProduct(ctx7, VarSpace(2), ((LinearForm.diff(0, 1), 2),)), (2, 2))
    assert {m: int(sq.coefficient(m)) for m in [(2, 0), (1, 1), (0, 2)]} \
        == {(2, 0): 1, (1, 1): 5, (0, 2): 1}


def test_expand_known_bivariate_coefficient():
    # coefficient of x^4 y^4 in x(1-x)^3 (y-x)^3 (1-y)^2 over F_5
    ctx = FpContext(5)
    space = VarSpace(2, ("x", "y"))
    fp = FactorProduct(ctx, space, (
        (LinearForm.var(0), 1),
        (LinearForm.one_minus(0), 3),
        (LinearForm.diff(1, 0), 3),
        (LinearForm.one_minus(1), 2),
    ))
    assert extract_coefficient(fp, (4, 4)) == 3
    assert int(expand(fp, (4, 4)).coefficient((4, 4))) == 3


def test_truncation_drops_high_monomials_only():
    ctx = FpContext(7)
    fp = FactorProduct(ctx, VarSpace(1), ((LinearForm.one_minus(0), 5),))
    full = sparse_expand_oracle(fp)
    poly = expand(fp, (2,))
    for i in range(3):
        assert int(poly.coefficient((i,))) == full.get((i,), 0)
    with pytest.raises(IndexOutOfCaps):
        poly.coefficient((3,))


def test_exponent_at_or_above_p_uses_lucas_rows():
    # (1-x)^p = 1 - x^p mod p, so the row is sparse
    ctx = FpContext(7)
    fp = FactorProduct(ctx, VarSpace(1), ((LinearForm.one_minus(0), 7),))
    poly = expand(fp, (7,))
    got = {i: int(poly.coefficient((i,))) for i in range(8)
           if int(poly.coefficient((i,)))}
    assert got == {0: 1, 7: 6}


def test_trinomial_factor():
    # (1 + x - y)^2 = 1 + 2x - 2y + x^2 - 2xy + y^2
    ctx = FpContext(11)
    form = LinearForm(1, ((0, 1), (1, -1)))
    fp = FactorProduct(ctx, VarSpace(2), ((form, 2),))
    poly = expand(fp, (2, 2))
    expect = {(0, 0): 1, (1, 0): 2, (0, 1): 9, (2, 0): 1, (1, 1): 9, (0, 2): 1}
    for mono, v in expect.items():
        assert int(poly.coefficient(mono)) == v


def test_scalar_and_zero_factor():
    ctx = FpContext(5)
    fp = FactorProduct(ctx, VarSpace(1), ((LinearForm(0, ()), 1),), scalar=3)
    # the form with no terms and zero constant is identically 0
    assert extract_coefficient(fp, (0,)) == 0
    fp2 = FactorProduct(ctx, VarSpace(1), (), scalar=7)
    assert extract_coefficient(fp2, (0,)) == 2


def test_from_dict_multiply_matches_factored_expand():
    ctx = FpContext(7)
    space = VarSpace(2)
    a = FactorProduct(ctx, space, ((LinearForm.var(0), 2), (LinearForm.one_minus(1), 1)))
    b = FactorProduct(ctx, space, ((LinearForm.diff(0, 1), 2),))
    caps = (5, 4)
    combined = FactorProduct(ctx, space, a.factors + b.factors)
    assert multiply(expand(a, caps), expand(b, caps)) == expand(combined, caps)


def test_derivative_known():
    ctx = FpContext(7)
    poly = TruncatedPoly.from_dict(ctx, (3, 2), {(3, 1): 2, (1, 0): 5})
    d0 = derivative(poly, 0)
    assert int(d0.coefficient((2, 1))) == 6
    assert int(d0.coefficient((0, 0))) == 5
    # the top slot along the derived axis has no incoming term and reads 0
    assert int(d0.coefficient((3, 1))) == 0


def test_derivative_frobenius_and_missing_variable():
    ctx = FpContext(5)
    x5 = TruncatedPoly.from_dict(ctx, (5,), {(5,): 1})
    assert derivative(x5, 0).nonzero_count() == 0  # d/dx x^5 = 5x^4 = 0
    x_only = TruncatedPoly.from_dict(ctx, (3, 3), {(2, 0): 1, (1, 0): 3})
    assert derivative(x_only, 1).nonzero_count() == 0


def test_budget_env_override(monkeypatch):
    monkeypatch.setenv("FP_SELBERG_MEM_BUDGET", "10")
    assert slot_budget() == 10
    ctx = FpContext(5)
    fp = FactorProduct(ctx, VarSpace(2), ((LinearForm.var(0), 1), (LinearForm.var(1), 1)))
    with pytest.raises(CapacityExceeded):
        expand(fp, (9, 9))
    monkeypatch.setenv("FP_SELBERG_MEM_BUDGET", "banana")
    with pytest.raises(PreconditionViolation):
        slot_budget()
    monkeypatch.setenv("FP_SELBERG_MEM_BUDGET", "-4")
    with pytest.raises(PreconditionViolation):
        slot_budget()
    monkeypatch.delenv("FP_SELBERG_MEM_BUDGET")
    assert slot_budget() == 2**30


# --- randomized cross-checks against the sparse oracle ---------------------

@st.composite
def small_products(draw):
    p = draw(st.sampled_from([5, 7, 11]))
    ctx = FpContext(p)
    nv = draw(st.integers(1, 3))
    space = VarSpace(nv)
    n_factors = draw(st.integers(1, 5))
    factors = []
    for _ in range(n_factors):
        kind = draw(st.integers(0, 3))
        if kind == 0:
            form = LinearForm.var(draw(st.integers(0, nv - 1)))
        elif kind == 1:
            form = LinearForm.one_minus(draw(st.integers(0, nv - 1)))
        elif kind == 2 and nv >= 2:
            i = draw(st.integers(0, nv - 2))
            form = LinearForm.diff(i, draw(st.integers(i + 1, nv - 1)))
        else:
            i = draw(st.integers(0, nv - 1))
            c0 = draw(st.integers(-2, 2))
            c1 = draw(st.integers(-2, 2).filter(bool))
            form = LinearForm(c0, ((i, c1),))
        factors.append((form, draw(st.integers(0, 6))))
    scalar = draw(st.integers(1, p - 1))
    caps = tuple(draw(st.integers(0, 8)) for _ in range(nv))
    return FactorProduct(ctx, space, tuple(factors), scalar), caps


@settings(max_examples=60, deadline=None)
@given(small_products())
def test_truncated_expansion_matches_sparse_oracle(case):
    fp, caps = case
    poly = expand(fp, caps)
    full = sparse_expand_oracle(fp)
    seen = 0
    for mono, value in full.items():
        if all(m <= c for m, c in zip(mono, caps)):
            assert int(poly.coefficient(mono)) == value
            seen += 1
    assert poly.nonzero_count() == seen


@settings(max_examples=40, deadline=None)
@given(small_products(), st.randoms(use_true_random=False))
def test_expansion_is_factor_order_independent(case, rng):
    fp, caps = case
    shuffled = list(fp.factors)
    rng.shuffle(shuffled)
    fp2 = FactorProduct(fp.ctx, fp.space, tuple(shuffled), fp.scalar)
    assert expand(fp, caps) == expand(fp2, caps)


@settings(max_examples=40, deadline=None)
@given(small_products())
def test_extract_agrees_with_expand(case):
    fp, caps = case
    poly = expand(fp, caps)
    assert extract_coefficient(fp, caps) == int(poly.coefficient(caps))


@settings(max_examples=30, deadline=None)
@given(small_products(), small_products())
def test_multiply_commutes(case_a, case_b):
    fp_a, caps = case_a
    fp_b, _ = case_b
    if fp_a.ctx.p != fp_b.ctx.p or fp_a.space.num_vars != fp_b.space.num_vars:
        return
    a, b = expand(fp_a, caps), expand(fp_b, caps)
    assert multiply(a, b) == multiply(b, a)


def test_oracle_term_limit():
    ctx = FpContext(7)
    fp = FactorProduct(ctx, VarSpace(2), (
        (LinearForm.one_minus(0), 6), (LinearForm.one_minus(1), 6)))
    with pytest.raises(CapacityExceeded):
        sparse_expand_oracle(fp, max_terms=5)
