"""Numerical zero counting for even- and odd-weight Eisenstein series.

Evaluates the series E_k, G_k and the divisor-sum series GG_k (plus their
slashed translates), counts weighted zeros in any SL2(Z)-translate of the
standard fundamental domain by the argument principle, locates the zeros,
and ships closed-form oracles for every count formula and inequality the
package verifies.
"""

from ._backend import BACKEND
from .moebius import (
    CUSP_INFINITY,
    Cusp,
    ExtendedRational,
    INFINITY,
    UniModularMatrix,
    apply_moebius,
    boundary_weight,
    gamma_for_lambda,
    lambda_of,
    parse_extended_rational,
    reduce_to_fundamental,
)
from .eisenstein import (
    AccuracyError,
    EvalParams,
    EvalResult,
    SeriesKind,
    SlashedSeries,
    bernoulli,
    derivative,
    eval_lattice,
    eval_series,
    eval_slashed,
    evaluate,
    fourier_constant,
    hat_eval,
    tail_bound,
    zeta_value,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AccuracyError",
    "CUSP_INFINITY",
    "Cusp",
    "EvalParams",
    "EvalResult",
    "ExtendedRational",
    "INFINITY",
    "SeriesKind",
    "SlashedSeries",
    "UniModularMatrix",
    "apply_moebius",
    "bernoulli",
    "boundary_weight",
    "derivative",
    "eval_lattice",
    "eval_series",
    "eval_slashed",
    "evaluate",
    "fourier_constant",
    "gamma_for_lambda",
    "hat_eval",
    "lambda_of",
    "parse_extended_rational",
    "reduce_to_fundamental",
    "tail_bound",
    "zeta_value",
]
