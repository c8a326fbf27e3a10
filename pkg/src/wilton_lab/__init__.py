"""Wilton's function, the cotangent-sum series g(x) and its moments.

The main entry points are re-exported here; see the submodules for the
full API and the CLI (``wilton-lab`` / ``python -m wilton_lab``).
"""

__version__ = "0.1.0"

from .errors import CalibrationError, CFTerminated, DomainError, ParseError, WiltonLabError
from .realspec import CFCoeffs, Dyadic, Rational, dyadic_from_seed, format_realspec, parse_realspec
from .gauss_cf import cf_expand, gauss_map, orbit_terms
from .special import (EvalResult, a_lambda, a_one, bernoulli_b1, bernoulli_b2, direct_a_oracle,
                      f_func, phi2)
from .wilton import WiltonEval, g_big, h_func, partial_sum_L, transfer_apply_l, wilton
from .gfun import ScanRecord, cotangent_sum, g_fast, g_series_oracle, scan_cotangent
from .measure import (Interval, gauss_measure, j_set_probe, preimage_measure,
                      transfer_norm_ratio)
from .moments import (MomentEstimate, calib_moment_l, calib_weighted_moment, moment_g,
                      moment_table, prediction)

__all__ = [
    "CalibrationError", "CFTerminated", "DomainError", "ParseError", "WiltonLabError",
    "CFCoeffs", "Dyadic", "Rational", "dyadic_from_seed", "format_realspec", "parse_realspec",
    "cf_expand", "gauss_map", "orbit_terms",
    "EvalResult", "a_lambda", "a_one", "bernoulli_b1", "bernoulli_b2", "direct_a_oracle",
    "f_func", "phi2",
    "WiltonEval", "g_big", "h_func", "partial_sum_L", "transfer_apply_l", "wilton",
    "ScanRecord", "cotangent_sum", "g_fast", "g_series_oracle", "scan_cotangent",
    "Interval", "gauss_measure", "j_set_probe", "preimage_measure", "transfer_norm_ratio",
    "MomentEstimate", "calib_moment_l", "calib_weighted_moment", "moment_g", "moment_table",
    "prediction",
]
