from itertools import product

import pytest

from fpselberg.admissible import (AdmissibilityReport, decrement_path,
                                  distinguished_point, enumerate_admissible,
                                  enumerate_admissible_I, is_admissible,
                                  is_admissible_I, lower_bounds)
from fpselberg.errors import PreconditionViolation
from fpselberg.formulas import r_value
from fpselberg.gf import FpContext
from fpselberg.integrals import KComposition, ParamPoint


def test_report_consistency():
    assert AdmissibilityReport(True)
    assert not AdmissibilityReport(False, ("ine14[a]",))
    with pytest.raises(PreconditionViolation):
        AdmissibilityReport(True, ("ine14[a]",))
    with pytest.raises(PreconditionViolation):
        AdmissibilityReport(False)


def test_requires_strictly_decreasing():
    ctx = FpContext(7)
    with pytest.raises(PreconditionViolation):
        is_admissible(KComposition((2, 2)), ParamPoint(1, (1, 1), 1), ctx)
    with pytest.raises(PreconditionViolation):
        enumerate_admissible(KComposition((1, 1)), ctx)


def test_known_admissible_counts():
    assert len(enumerate_admissible(KComposition((1,)), FpContext(5))) == 36
    assert len(enumerate_admissible(KComposition((2, 1)), FpContext(7))) == 61


def test_enumeration_order_and_limit():
    ctx = FpContext(5)
    pts = enumerate_admissible(KComposition((1,)), ctx)
    keys = [(pt.a, pt.b, pt.c) for pt in pts]
    assert keys == sorted(keys)
    assert enumerate_admissible(KComposition((1,)), ctx, limit=5) == pts[:5]


def test_violation_identifiers():
    ctx = FpContext(7)
    k = KComposition((2, 1))
    # b1 far below its floor trips the first-block and 13-block lower bounds
    rep = is_admissible(k, ParamPoint(1, (1, 2), 1), ctx)
    assert not rep
    assert any(v.startswith("ine13[") or v == "ine14[b1]" for v in rep.violated)
    rep2 = is_admissible(k, ParamPoint(0, (1, 1), 1), ctx)
    assert "positivity" in rep2.violated


def test_every_enumerated_point_is_admissible_and_above_floors():
    ctx = FpContext(7)
    for k in (KComposition((2, 1)), KComposition((3, 1)), KComposition((3, 2))):
        pts = enumerate_admissible(k, ctx)
        for pt in pts:
            assert is_admissible(k, pt, ctx)
            lows = lower_bounds(k, pt.a, pt.c, ctx)
            assert all(b >= lo for b, lo in zip(pt.b, lows))


@pytest.mark.parametrize("kparts,p", [
    ((1,), 5), ((2,), 5), ((1,), 7), ((3,), 7),
    ((2, 1), 5), ((2, 1), 7), ((3, 1), 7), ((3, 2), 7),
])
def test_admissible_iff_closed_form_defined(kparts, p):
    # the inequality system is exactly "every factorial argument of the
    # closed form lies in [0,p)" plus a+(k1-1)c < p-1, over positive tuples
    ctx = FpContext(p)
    k = KComposition(kparts)
    for a in range(1, 2 * p - 1):
        for c in range(1, 2 * p - 1):
            for b in product(range(1, 2 * p - 1), repeat=k.n):
                pt = ParamPoint(a, b, c)
                direct = bool(is_admissible(k, pt, ctx))
                via_formula = (r_value(k, pt, ctx).ok
                               and a + (k.part(1) - 1) * c < p - 1)
                assert direct == via_formula


def test_distinguished_point_values():
    assert distinguished_point(KComposition((2, 1)), 2, 3, FpContext(11)) \
        == ParamPoint(2, (5, 5), 3)
    assert distinguished_point(KComposition((3, 2, 1)), 1, 1, FpContext(7)) \
        == ParamPoint(1, (3, 1, 1), 1)


def test_distinguished_point_preconditions():
    ctx = FpContext(7)
    k = KComposition((2, 1))
    with pytest.raises(PreconditionViolation):
        distinguished_point(k, 1, 4, ctx)  # k1*c = 8 > p-1
    with pytest.raises(PreconditionViolation):
        distinguished_point(k, 5, 1, ctx)  # a + (k1-1)c = 6 = p-1
    with pytest.raises(PreconditionViolation):
        distinguished_point(k, 0, 1, ctx)


def test_distinguished_point_is_admissible_everywhere_defined():
    for p in (7, 11):
        ctx = FpContext(p)
        for k in (KComposition((2, 1)), KComposition((3, 2, 1))):
            for c in range(1, (p - 1) // k.part(1) + 1):
                for a in range(1, p - 1 - (k.part(1) - 1) * c):
                    pt = distinguished_point(k, a, c, ctx)
                    assert is_admissible(k, pt, ctx)


def test_decrement_path_reaches_distinguished_point():
    for p in (7, 11):
        ctx = FpContext(p)
        k = KComposition((2, 1))
        for frm in enumerate_admissible(k, ctx):
            target = distinguished_point(k, frm.a, frm.c, ctx)
            path = decrement_path(k, frm, ctx)
            assert len(path) == sum(frm.b) - sum(target.b)
            cur = frm
            for idx, nxt in path:
                assert nxt.b[idx] == cur.b[idx] - 1
                assert sum(nxt.b) == sum(cur.b) - 1
                assert is_admissible(k, nxt, ctx)
                cur = nxt
            assert cur == target


def test_decrement_path_edge_cases():
    ctx = FpContext(11)
    k = KComposition((2, 1))
    base = ParamPoint(2, (5, 5), 3)
    assert is_admissible(k, base, ctx)
    # already at the bottom: nothing to decrement
    assert decrement_path(k, base, ctx) == []
    # one unit of slack in b1 only: a single step back to the base point
    assert decrement_path(k, ParamPoint(2, (6, 5), 3), ctx) == [(0, base)]


def test_decrement_path_tie_break_prefers_small_index():
    ctx = FpContext(11)
    k = KComposition((2, 1))
    frm = next(pt for pt in enumerate_admissible(k, ctx)
               if len(decrement_path(k, pt, ctx)) >= 2)
    target = distinguished_point(k, frm.a, frm.c, ctx)
    slacks = [frm.b[i] - target.b[i] for i in range(2)]
    first_idx = decrement_path(k, frm, ctx)[0][0]
    assert first_idx == max(range(2), key=lambda i: (slacks[i], -i))


def test_decrement_path_rejects_inadmissible_start():
    ctx = FpContext(7)
    with pytest.raises(PreconditionViolation):
        decrement_path(KComposition((2, 1)), ParamPoint(1, (1, 1), 1), ctx)


def test_admissible_I_counts_and_boundary():
    ctx = FpContext(7)
    pts = enumerate_admissible_I(2, 1, ctx)
    assert len(pts) == 60
    # lower boundary b2 = (k1-k2+1)c must be populated
    assert any(pt.b[1] == 2 * pt.c for pt in pts)
    for pt in pts:
        assert pt.b[1] >= 2 * pt.c
        assert pt.b[0] >= ctx.p - (pt.a + pt.c)
        assert is_admissible_I(2, 1, pt, ctx)


def test_admissible_I_identifiers():
    ctx = FpContext(7)
    rep = is_admissible_I(2, 1, ParamPoint(1, (1, 1), 1), ctx)
    assert not rep
    assert rep.violated
    with pytest.raises(PreconditionViolation):
        is_admissible_I(1, 1, ParamPoint(1, (1, 1), 1), ctx)
