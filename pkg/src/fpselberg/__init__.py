"""Exact verification of finite-field Selberg integrals of type A_n.

Integrals are single coefficients of truncated polynomial expansions over
F_p; closed forms are factorial products evaluated in the same field.  The
harness compares the two over exhaustive or seeded-sample parameter grids.
"""

from .admissible import (AdmissibilityReport, decrement_path, distinguished_point,
                         enumerate_admissible, enumerate_admissible_I,
                         is_admissible, is_admissible_I)
from .errors import (CapacityExceeded, FpSelbergError, IndexOutOfCaps,
                     InvalidExponent, NegativeExponent, NoPath, NotAllowable,
                     OutOfRange, PreconditionViolation, ZeroFactor)
from .formulas import (FormulaResult, b_factors, beta_rhs, dyson_constant,
                       i000_rhs, induction_factor, r_a2, r_value, rhs_3_11,
                       rhs_4_111, shift_factor_b1, shift_factor_b2)
from .gf import FpContext, FpElement, checked_factorial, sign_pow, wilson_cancel
from .harness import (CampaignSpec, VerificationReport, bench, run_campaign,
                      verify_induction, verify_relation_S1, verify_relation_S2)
from .integrals import (AllowableTriple, KComposition, ParamPoint, PCycle,
                        WeightSummand, cycle_from_composition, fp_integral,
                        master_polynomial, selberg_integral, weight_summands,
                        weighted_integral)
from .mpoly import (FactorProduct, LinearForm, TruncatedPoly, VarSpace,
                    derivative, expand, extract_coefficient, multiply,
                    slot_budget, sparse_expand_oracle)

__version__ = "0.1.0"
