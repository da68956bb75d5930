"""Multivariate polynomial expansion over F_p with per-variable degree caps.

The central object is a `FactorProduct`: a scalar times a product of powers
of affine forms (x_i, 1 - x_i, x_i - x_j).  Coefficient extraction works on a
dense numpy tensor truncated to per-variable caps.  Truncation is exact for
the coefficients it keeps: every factor has nonnegative exponents in every
variable, so monomials above a cap can never contribute back down to a
retained coefficient.

Two engines are provided:

* `expand` / `extract_coefficient`: the dense truncated engine.  Factors are
  multiplied in ascending variable order (single-variable factors first, then
  differences), growing one tensor axis at a time so intermediates stay as
  small as possible.  `extract_coefficient` additionally projects an axis to
  its target index as soon as no remaining factor touches that variable,
  which keeps the live tensor far below the full cap product for chained
  variable groups.

* `sparse_expand_oracle`: a deliberately simple dict-of-monomials full
  expansion used as an independent cross-check and as the slow side of the
  benchmark comparison.

The coefficient-slot budget (default 2^30 slots) can be overridden with the
FP_SELBERG_MEM_BUDGET environment variable.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass

import numpy as np

from .errors import (CapacityExceeded, IndexOutOfCaps, InvalidExponent,
                     PreconditionViolation)
from .gf import FpContext, FpElement, binom

DEFAULT_SLOT_BUDGET = 2**30
_BUDGET_ENV = "FP_SELBERG_MEM_BUDGET"


def slot_budget() -> int:
    """Current coefficient-slot budget (env override, else the default)."""
    raw = os.environ.get(_BUDGET_ENV)
    if raw is None:
        return DEFAULT_SLOT_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise PreconditionViolation(f"{_BUDGET_ENV} must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise PreconditionViolation(f"{_BUDGET_ENV} must be positive, got {value}")
    return value


def _default_labels(n: int) -> tuple[str, ...]:
    return tuple(f"x{i}" for i in range(n))


@dataclass(frozen=True)
class VarSpace:
    """An ordered set of variables, with labels for diagnostics."""

    num_vars: int
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.num_vars < 0:
            raise PreconditionViolation("num_vars must be >= 0")
        if not self.labels:
            object.__setattr__(self, "labels", _default_labels(self.num_vars))
        elif len(self.labels) != self.num_vars:
            raise PreconditionViolation("labels length must match num_vars")


@dataclass(frozen=True)
class LinearForm:
    """constant + sum of coeff * x_var with at most two variable terms.

    Coefficients are stored as plain (possibly negative) ints and reduced
    mod p at expansion time, so forms are context-free and hashable.
    """

    constant: int = 0
    terms: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if len(self.terms) > 2:
            raise PreconditionViolation("a LinearForm has at most two variable terms")
        vars_seen = [v for v, _ in self.terms]
        if len(set(vars_seen)) != len(vars_seen):
            raise PreconditionViolation("duplicate variable in LinearForm")
        if any(v < 0 for v in vars_seen):
            raise PreconditionViolation("negative variable index")

    @classmethod
    def var(cls, i: int) -> "LinearForm":
        return cls(0, ((i, 1),))

    @classmethod
    def one_minus(cls, i: int) -> "LinearForm":
        return cls(1, ((i, -1),))

    @classmethod
    def diff(cls, i: int, j: int) -> "LinearForm":
        """x_i - x_j."""
        return cls(0, ((i, 1), (j, -1)))

    def variables(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.terms)

    def remapped(self, perm: dict[int, int]) -> "LinearForm":
        return LinearForm(self.constant, tuple((perm[v], c) for v, c in self.terms))


@dataclass(frozen=True)
class FactorProduct:
    """scalar * product of LinearForm ** exponent over a variable space."""

    ctx: FpContext
    space: VarSpace
    factors: tuple[tuple[LinearForm, int], ...]
    scalar: int = 1

    def __post_init__(self):
        for form, e in self.factors:
            if e < 0:
                raise InvalidExponent(f"negative exponent {e} on {form}")
            for v in form.variables():
                if v >= self.space.num_vars:
                    raise PreconditionViolation(
                        f"variable index {v} outside space of {self.space.num_vars}")
        object.__setattr__(self, "factors", tuple(self.factors))

    def permuted(self, perm: list[int]) -> "FactorProduct":
        """Relabel variable i as perm[i] everywhere (perm is a bijection)."""
        if sorted(perm) != list(range(self.space.num_vars)):
            raise PreconditionViolation("perm must be a permutation of the variables")
        mapping = {i: perm[i] for i in range(len(perm))}
        labels = list(self.space.labels)
        for i, j in mapping.items():
            labels[j] = self.space.labels[i]
        return FactorProduct(
            self.ctx,
            VarSpace(self.space.num_vars, tuple(labels)),
            tuple((f.remapped(mapping), e) for f, e in self.factors),
            self.scalar,
        )


class TruncatedPoly:
    """Dense coefficient tensor truncated to per-variable caps."""

    __slots__ = ("ctx", "caps", "coeffs")

    def __init__(self, ctx: FpContext, caps: tuple[int, ...], coeffs: np.ndarray):
        self.ctx = ctx
        self.caps = tuple(caps)
        expected = tuple(c + 1 for c in self.caps)
        if coeffs.shape != expected:
            raise PreconditionViolation(f"coeff tensor shape {coeffs.shape} != caps+1 {expected}")
        self.coeffs = coeffs

    @classmethod
    def from_dict(cls, ctx: FpContext, caps: tuple[int, ...],
                  entries: dict[tuple[int, ...], int]) -> "TruncatedPoly":
        arr = np.zeros(tuple(c + 1 for c in caps), dtype=np.int64)
        for e, v in entries.items():
            arr[tuple(e)] = v % ctx.p
        return cls(ctx, caps, arr)

    def coefficient(self, exponents: tuple[int, ...]) -> FpElement:
        if len(exponents) != len(self.caps):
            raise IndexOutOfCaps(f"expected {len(self.caps)} exponents, got {len(exponents)}")
        for e, cap in zip(exponents, self.caps):
            if e < 0 or e > cap:
                raise IndexOutOfCaps(f"exponent vector {exponents} outside caps {self.caps}")
        return FpElement(int(self.coeffs[tuple(exponents)]), self.ctx)

    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.coeffs))

    def __eq__(self, other):
        return (isinstance(other, TruncatedPoly) and self.ctx.p == other.ctx.p
                and self.caps == other.caps and bool(np.array_equal(self.coeffs, other.coeffs)))

    def __repr__(self):
        return f"TruncatedPoly(p={self.ctx.p}, caps={self.caps}, nnz={self.nonzero_count()})"


def multiply(a: TruncatedPoly, b: TruncatedPoly) -> TruncatedPoly:
    """Truncated product of two polys over the same caps in the same field."""
    if a.ctx.p != b.ctx.p or a.caps != b.caps:
        raise PreconditionViolation("multiply needs matching contexts and caps")
    p = a.ctx.p
    out = np.zeros_like(a.coeffs)
    if b.nonzero_count() > a.nonzero_count():
        a, b = b, a
    for idx in np.argwhere(b.coeffs):
        v = int(b.coeffs[tuple(idx)])
        src = tuple(slice(0, n - d) for n, d in zip(a.coeffs.shape, idx))
        dst = tuple(slice(d, None) for d in idx)
        out[dst] += v * a.coeffs[src]
        out %= p
    return TruncatedPoly(a.ctx, a.caps, out)


def derivative(poly: TruncatedPoly, var: int) -> TruncatedPoly:
    """Partial derivative along one variable, same caps (top slot zeroed)."""
    if var < 0 or var >= len(poly.caps):
        raise PreconditionViolation(f"variable {var} outside caps {poly.caps}")
    out = np.zeros_like(poly.coeffs)
    n = poly.caps[var]
    if n > 0:
        shape = [1] * len(poly.caps)
        shape[var] = n
        mult = np.arange(1, n + 1, dtype=np.int64).reshape(shape)
        src = tuple(slice(1, None) if i == var else slice(None) for i in range(len(poly.caps)))
        dst = tuple(slice(0, n) if i == var else slice(None) for i in range(len(poly.caps)))
        out[dst] = poly.coeffs[src] * mult % poly.ctx.p
    return TruncatedPoly(poly.ctx, poly.caps, out)


# ---------------------------------------------------------------------------
# expansion engine
# ---------------------------------------------------------------------------

def _factor_terms(ctx: FpContext, form: LinearForm, e: int,
                  caps: tuple[int, ...] | None):
    """Expand form**e into [(shifts, coeff)] with shifts = ((axis, d), ...).

    Two-monomial forms get a Lucas binomial row (valid for e >= p); the rare
    three-monomial case (constant plus two variables) falls back to repeated
    squaring of a tiny sparse poly.  Terms whose shift exceeds a cap are
    dropped -- they cannot contribute to any retained coefficient.
    """
    p = ctx.p
    monos = []  # (axis or None, residue)
    if form.constant % p:
        monos.append((None, form.constant % p))
    for v, c in form.terms:
        if c % p:
            monos.append((v, c % p))

    if e == 0:
        return [((), 1)]
    if not monos:
        return []  # the zero form: annihilates the product
    if len(monos) == 1:
        axis, c = monos[0]
        coeff = pow(c, e, p)
        shifts = () if axis is None else ((axis, e),)
        if axis is not None and caps is not None and e > caps[axis]:
            return []
        return [(shifts, coeff)]
    if len(monos) == 2:
        (ax_a, ca), (ax_b, cb) = monos
        out = []
        pow_a = 1
        pow_b = pow(cb, e, p)
        inv_cb = pow(cb, p - 2, p)
        for d in range(e + 1):
            coeff = binom(ctx, e, d) * pow_a % p * pow_b % p
            pow_a = pow_a * ca % p
            pow_b = pow_b * inv_cb % p
            if coeff == 0:
                continue
            shifts = []
            if ax_a is not None:
                if caps is not None and d > caps[ax_a]:
                    continue
                if d:
                    shifts.append((ax_a, d))
            if ax_b is not None:
                if caps is not None and e - d > caps[ax_b]:
                    continue
                if e - d:
                    shifts.append((ax_b, e - d))
            out.append((tuple(shifts), coeff))
        return out

    # constant + two variables: square a {(d1, d2): coeff} dict
    (_, c0), (ax1, c1), (ax2, c2) = sorted(monos, key=lambda m: (m[0] is not None, m[0]))
    base = {(0, 0): c0, (1, 0): c1, (0, 1): c2}
    acc = {(0, 0): 1}
    k = e
    while k:
        if k & 1:
            acc = _dict_mul2(acc, base, p)
        k >>= 1
        if k:
            base = _dict_mul2(base, base, p)
    out = []
    for (d1, d2), coeff in acc.items():
        if caps is not None and (d1 > caps[ax1] or d2 > caps[ax2]):
            continue
        shifts = tuple(s for s in ((ax1, d1), (ax2, d2)) if s[1])
        out.append((shifts, coeff))
    return out


def _dict_mul2(a: dict, b: dict, p: int) -> dict:
    out: dict[tuple[int, int], int] = {}
    for (e1, e2), ca in a.items():
        for (f1, f2), cb in b.items():
            key = (e1 + f1, e2 + f2)
            v = (out.get(key, 0) + ca * cb) % p
            if v:
                out[key] = v
            elif key in out:
                del out[key]
    return out


def _plan(factors):
    """Multiplication order: ascending max variable, singles before pairs."""
    def key(item):
        form, _ = item
        vs = sorted(form.variables())
        return (max(vs) if vs else -1, len(vs), vs)
    return sorted(factors, key=key)


def _run_engine(fp: FactorProduct, caps: tuple[int, ...], project_targets: bool):
    """Shared core of expand/extract.  Returns the final tensor.

    With project_targets=True each axis is collapsed to its cap index as soon
    as its last factor has been multiplied in, so the return value is a tensor
    whose introduced axes all have length 1.
    """
    ctx, p = fp.ctx, fp.ctx.p
    nv = fp.space.num_vars
    if len(caps) != nv:
        raise PreconditionViolation(f"caps length {len(caps)} != num_vars {nv}")
    if any(c < 0 for c in caps):
        raise PreconditionViolation("caps must be nonnegative")
    budget = slot_budget()
    full_size = math.prod(c + 1 for c in caps)
    if not project_targets and full_size > budget:
        raise CapacityExceeded(f"{full_size} slots exceed budget {budget}")

    plan = _plan([(f, e) for f, e in fp.factors if e > 0])
    last_use = {}
    for idx, (form, _) in enumerate(plan):
        for v in form.variables():
            last_use[v] = idx

    arr = np.zeros((1,) * nv, dtype=np.int64)
    arr[(0,) * nv] = fp.scalar % p
    introduced = [False] * nv

    def introduce(vs):
        nonlocal arr
        new_shape = list(arr.shape)
        for v in vs:
            new_shape[v] = caps[v] + 1
        size = math.prod(new_shape)
        if size > budget:
            raise CapacityExceeded(f"{size} live slots exceed budget {budget}")
        new = np.zeros(new_shape, dtype=np.int64)
        new[tuple(slice(0, s) for s in arr.shape)] = arr
        arr = new
        for v in vs:
            introduced[v] = True

    for idx, (form, e) in enumerate(plan):
        fresh = [v for v in form.variables() if not introduced[v]]
        if fresh:
            introduce(fresh)
        terms = _factor_terms(ctx, form, e, caps)
        new = np.zeros_like(arr)
        for shifts, coeff in terms:
            src = [slice(None)] * nv
            dst = [slice(None)] * nv
            skip = False
            for axis, d in shifts:
                n = arr.shape[axis]
                if d >= n:
                    skip = True
                    break
                src[axis] = slice(0, n - d)
                dst[axis] = slice(d, None)
            if skip:
                continue
            new[tuple(dst)] += coeff * arr[tuple(src)]
        new %= p
        arr = new
        if project_targets:
            for v in form.variables():
                if last_use[v] == idx:
                    arr = np.take(arr, [caps[v]], axis=v)
    return arr, introduced


def expand(fp: FactorProduct, caps: tuple[int, ...]) -> TruncatedPoly:
    """Full truncated expansion of a factor product.

    Raises CapacityExceeded when the cap box itself is over budget.
    """
    arr, introduced = _run_engine(fp, tuple(caps), project_targets=False)
    if any(not done for done in introduced):
        full = np.zeros(tuple(c + 1 for c in caps), dtype=np.int64)
        full[tuple(slice(0, s) for s in arr.shape)] = arr
        arr = full
    return TruncatedPoly(fp.ctx, tuple(caps), arr)


def extract_coefficient(fp: FactorProduct, target: tuple[int, ...]) -> int:
    """Coefficient of the monomial with the given exponent vector, as an int.

    Equivalent to expand(fp, target).coefficient(target) but projects each
    variable out as soon as it is complete, so the live tensor stays small.
    """
    arr, introduced = _run_engine(fp, tuple(target), project_targets=True)
    for v, done in enumerate(introduced):
        if not done and target[v] > 0:
            return 0
    return int(arr.reshape(-1)[0])


def sparse_expand_oracle(fp: FactorProduct, max_terms: int | None = None,
                         deadline_s: float | None = None) -> dict[tuple[int, ...], int]:
    """Reference full expansion into {exponent tuple: residue}, no truncation.

    Intentionally naive (schoolbook dict convolution).  `max_terms` defaults
    to the slot budget; `deadline_s` is a wall-clock limit used by the bench
    comparison.  Both abort with CapacityExceeded.
    """
    ctx, p = fp.ctx, fp.ctx.p
    nv = fp.space.num_vars
    limit = slot_budget() if max_terms is None else max_terms
    t0 = time.monotonic()
    acc: dict[tuple[int, ...], int] = {(0,) * nv: fp.scalar % p}
    for form, e in _plan([(f, x) for f, x in fp.factors if x > 0]):
        terms = _factor_terms(ctx, form, e, None)
        new: dict[tuple[int, ...], int] = {}
        ops = 0
        for mono, cm in acc.items():
            for shifts, coeff in terms:
                key = list(mono)
                for axis, d in shifts:
                    key[axis] += d
                key = tuple(key)
                v = (new.get(key, 0) + cm * coeff) % p
                if v:
                    new[key] = v
                elif key in new:
                    del new[key]
                ops += 1
                if ops % 65536 == 0 and deadline_s is not None \
                        and time.monotonic() - t0 > deadline_s:
                    raise CapacityExceeded("sparse oracle exceeded its time limit")
        if len(new) > limit:
            raise CapacityExceeded(f"sparse oracle exceeded {limit} terms")
        acc = new
    return acc
