"""p-cycles, master polynomials, and coefficient-extraction integrals.

An F_p-integral over the p-cycle [l_1,...,l_k]_p is the coefficient of
x_1^{l_1 p - 1} ... x_k^{l_k p - 1}.  The Selberg-type integrand is a product
of power factors t^a, (1-t)^b, in-group differences to the power 2c, and
cross-group differences to the power p-c; its integral over the composite
cycle attached to a composition k is computed exactly by truncated expansion.

Variables are flattened group-major: all of group 1 first, then group 2, etc.,
with the j-th variable of group i at flat index k_1 + ... + k_{i-1} + j - 1.
The cycle built by `cycle_from_composition` uses the same order, so exponent
vectors and variable indices never need re-alignment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

from . import mpoly
from .errors import (CapacityExceeded, InvalidExponent, NegativeExponent,
                     NotAllowable, PreconditionViolation)
from .gf import FpContext, FpElement
from .mpoly import FactorProduct, LinearForm, VarSpace


@dataclass(frozen=True)
class PCycle:
    """The cycle [l_1,...,l_k]_p; target exponents are l_i*p - 1."""

    lengths: tuple[int, ...]

    def __post_init__(self):
        if not self.lengths or any(l < 1 for l in self.lengths):
            raise PreconditionViolation("cycle lengths must be positive")
        object.__setattr__(self, "lengths", tuple(self.lengths))

    def targets(self, p: int) -> tuple[int, ...]:
        return tuple(l * p - 1 for l in self.lengths)


@dataclass(frozen=True)
class KComposition:
    """(k_1,...,k_n), positive and weakly decreasing.

    The main identity requires strict decrease; the equal-parts cases (1,1)
    and (1,1,1) are still valid compositions for building master polynomials,
    so strictness is a predicate, not a construction invariant.
    """

    parts: tuple[int, ...]

    def __post_init__(self):
        if not self.parts or any(x < 1 for x in self.parts):
            raise PreconditionViolation("composition parts must be positive")
        for x, y in zip(self.parts, self.parts[1:]):
            if x < y:
                raise PreconditionViolation("composition parts must be weakly decreasing")
        object.__setattr__(self, "parts", tuple(self.parts))

    @property
    def n(self) -> int:
        return len(self.parts)

    def part(self, i: int) -> int:
        """k_i with the convention k_0 = k_{n+1} = 0 (1-based index)."""
        if 1 <= i <= self.n:
            return self.parts[i - 1]
        if i == 0 or i == self.n + 1:
            return 0
        raise PreconditionViolation(f"part index {i} out of range for n={self.n}")

    def is_strictly_decreasing(self) -> bool:
        return all(x > y for x, y in zip(self.parts, self.parts[1:]))

    def num_variables(self) -> int:
        return sum(self.parts)

    def truncated(self) -> "KComposition":
        """(k_1,...,k_{n-1}); requires n >= 2."""
        if self.n < 2:
            raise PreconditionViolation("cannot truncate a length-1 composition")
        return KComposition(self.parts[:-1])


@dataclass(frozen=True)
class ParamPoint:
    """Parameters (a, b_1..b_n, c).

    a and the b_i may be zero: shifted points like (a-1, b_1, b_2-1, c)
    arise on the right-hand sides of the contiguous relations.  c >= 1.
    """

    a: int
    b: tuple[int, ...]
    c: int

    def __post_init__(self):
        if self.a < 0 or self.c < 1 or any(x < 0 for x in self.b):
            raise PreconditionViolation(f"bad parameter point ({self.a}, {self.b}, {self.c})")
        object.__setattr__(self, "b", tuple(self.b))

    @property
    def n(self) -> int:
        return len(self.b)


def cycle_from_composition(k: KComposition) -> PCycle:
    """[(1)_{k_1}; (k_1)_{k_2}; ...; (k_{n-1})_{k_n}]."""
    lengths = []
    for i in range(1, k.n + 1):
        lengths.extend([max(k.part(i - 1), 1)] * k.part(i))
    return PCycle(tuple(lengths))


def variable_space(k: KComposition) -> VarSpace:
    labels = []
    for i in range(1, k.n + 1):
        for j in range(1, k.part(i) + 1):
            labels.append(f"t{i}_{j}")
    return VarSpace(k.num_variables(), tuple(labels))


def _flat_index(k: KComposition, group: int, j: int) -> int:
    """0-based flat index of variable j (1-based) in group (1-based)."""
    return sum(k.parts[: group - 1]) + j - 1


def master_polynomial(k: KComposition, pt: ParamPoint, ctx: FpContext) -> FactorProduct:
    """Product of t^{a_i}, (1-t)^{b_i}, in-group (t-t')^{2c}, cross (t'-t)^{p-c}.

    a_1 = a and a_i = 0 for i >= 2.  Zero-exponent factors are omitted.
    """
    if pt.n != k.n:
        raise PreconditionViolation(f"b has length {pt.n}, composition has n={k.n}")
    if pt.c > ctx.p:
        raise InvalidExponent(f"c={pt.c} > p={ctx.p} makes the cross exponent negative")
    factors: list[tuple[LinearForm, int]] = []
    for i in range(1, k.n + 1):
        a_i = pt.a if i == 1 else 0
        b_i = pt.b[i - 1]
        for j in range(1, k.part(i) + 1):
            v = _flat_index(k, i, j)
            if a_i:
                factors.append((LinearForm.var(v), a_i))
            if b_i:
                factors.append((LinearForm.one_minus(v), b_i))
        for j in range(1, k.part(i) + 1):
            for jp in range(j + 1, k.part(i) + 1):
                factors.append((LinearForm.diff(_flat_index(k, i, j), _flat_index(k, i, jp)),
                                2 * pt.c))
    for i in range(1, k.n):
        if ctx.p - pt.c == 0:
            continue
        for j in range(1, k.part(i + 1) + 1):
            for jp in range(1, k.part(i) + 1):
                factors.append((LinearForm.diff(_flat_index(k, i + 1, j), _flat_index(k, i, jp)),
                                ctx.p - pt.c))
    return FactorProduct(ctx, variable_space(k), tuple(factors))


def fp_integral(fp: FactorProduct, cycle: PCycle, ctx: FpContext) -> FpElement:
    """Coefficient of prod x_i^{l_i p - 1} in the expanded product."""
    if fp.ctx.p != ctx.p:
        raise PreconditionViolation("factor product built over a different prime")
    if fp.space.num_vars != len(cycle.lengths):
        raise PreconditionViolation(
            f"{fp.space.num_vars} variables vs cycle of length {len(cycle.lengths)}")
    targets = cycle.targets(ctx.p)
    box = math.prod(t + 1 for t in targets)
    budget = mpoly.slot_budget()
    if box > budget:
        raise CapacityExceeded(f"target box of {box} slots exceeds budget {budget}")
    return FpElement(mpoly.extract_coefficient(fp, targets), ctx)


def selberg_integral(k: KComposition, pt: ParamPoint, ctx: FpContext) -> FpElement:
    return fp_integral(master_polynomial(k, pt, ctx), cycle_from_composition(k), ctx)


# ---------------------------------------------------------------------------
# weighted integrals (two-group case)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AllowableTriple:
    """(l_1, l_2, m): valid when l_1 <= k_1-k_2+l_2, l_2 <= k_2, m <= min(l_1,l_2)."""

    l1: int
    l2: int
    m: int

    def __post_init__(self):
        if self.l1 < 0 or self.l2 < 0 or self.m < 0:
            raise PreconditionViolation("triple entries must be nonnegative")

    def check(self, k1: int, k2: int) -> None:
        if self.l1 > k1 - k2 + self.l2:
            raise NotAllowable(f"l1={self.l1} > k1-k2+l2={k1 - k2 + self.l2}")
        if self.l2 > k2:
            raise NotAllowable(f"l2={self.l2} > k2={k2}")
        if self.m > min(self.l1, self.l2):
            raise NotAllowable(f"m={self.m} > min(l1,l2)={min(self.l1, self.l2)}")


@dataclass(frozen=True)
class WeightSummand:
    """One (sigma, tau) term of the symmetrized weight function.

    Indices are 0-based within each group.  `pairs` are the (s_j, t_i)
    denominator pairs; they divide the cross factors of the integrand.
    """

    t_num: tuple[int, ...]
    t_one_minus: tuple[int, ...]
    s_one_minus: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]


def weight_summands(k1: int, k2: int, tr: AllowableTriple) -> list[WeightSummand]:
    """All k_1! * k_2! permutation summands, enumerated explicitly.

    The overall 1/(k_1! k_2!) normalization is applied by weighted_integral.
    """
    if k1 < k2 or k2 < 0 or k1 < 1:
        raise PreconditionViolation(f"need k1 >= k2 >= 0, k1 >= 1, got ({k1}, {k2})")
    tr.check(k1, k2)
    out = []
    for sigma in permutations(range(k1)):
        for tau in permutations(range(k2)):
            pairs = [(tau[b], sigma[b]) for b in range(tr.m)]
            pairs += [(tau[b], sigma[b + k1 - k2]) for b in range(tr.l2, k2)]
            out.append(WeightSummand(
                t_num=sigma[:tr.l1],
                t_one_minus=sigma[tr.l1:],
                s_one_minus=tuple(tau[b] for b in range(k2) if b < tr.m or b >= tr.l2),
                pairs=tuple(pairs),
            ))
    return out


def weighted_integral(k1: int, k2: int, tr: AllowableTriple, pt: ParamPoint,
                      ctx: FpContext) -> FpElement:
    """The integral I_{l1,l2,m}(a, b_1, b_2, c) for the two-group integrand.

    Each summand divides the integrand by prod t_i (1-t_i) prod (1-s_j) and
    by its denominator pairs, which is done symbolically by decrementing
    exponents; the numerator factors increment them back selectively.
    Requires a, b_1, b_2 >= 1 so no exponent goes negative.
    """
    p = ctx.p
    if k1 >= p or k2 >= p:
        raise PreconditionViolation("group sizes must be < p for the 1/(k1! k2!) factor")
    if pt.n != 2:
        raise PreconditionViolation("weighted integrals take b = (b1, b2)")
    a, (b1, b2), c = pt.a, pt.b, pt.c
    if c > p:
        raise InvalidExponent(f"c={c} > p={p}")
    summands = weight_summands(k1, k2, tr)

    labels = tuple(f"t{i+1}" for i in range(k1)) + tuple(f"s{j+1}" for j in range(k2))
    space = VarSpace(k1 + k2, labels)
    if k2 > 0:
        cycle = cycle_from_composition(KComposition((k1, k2)))
    else:
        cycle = PCycle((1,) * k1)

    def exponent(base: int, bump: int, what: str) -> int:
        e = base + bump
        if e < 0:
            raise NegativeExponent(f"{what} exponent {e} < 0")
        return e

    total = 0
    for sm in summands:
        factors: list[tuple[LinearForm, int]] = []
        for i in range(k1):
            factors.append((LinearForm.var(i),
                            exponent(a - 1, 1 if i in sm.t_num else 0, f"t{i+1}")))
            factors.append((LinearForm.one_minus(i),
                            exponent(b1 - 1, 1 if i in sm.t_one_minus else 0, f"1-t{i+1}")))
        for j in range(k2):
            factors.append((LinearForm.one_minus(k1 + j),
                            exponent(b2 - 1, 1 if j in sm.s_one_minus else 0, f"1-s{j+1}")))
        for j in range(k2):
            for i in range(k1):
                e = exponent(p - c, -1 if (j, i) in sm.pairs else 0, f"s{j+1}-t{i+1}")
                factors.append((LinearForm.diff(k1 + j, i), e))
        for i in range(k1):
            for ip in range(i + 1, k1):
                factors.append((LinearForm.diff(i, ip), 2 * c))
        for j in range(k2):
            for jp in range(j + 1, k2):
                factors.append((LinearForm.diff(k1 + j, k1 + jp), 2 * c))
        fp = FactorProduct(ctx, space, tuple((f, e) for f, e in factors if e > 0))
        total = (total + fp_integral(fp, cycle, ctx).residue) % p

    return ctx.element(total) / ctx.element(math.factorial(k1) * math.factorial(k2))
