"""Low-rank matrix denoising with closed-form discrepancy-principle thresholds."""

from .baselines import hardt_denoise, sure_denoise, sure_select, sure_value
from .discrepancy import (
    DpSolution,
    breakpoints_nn,
    breakpoints_wnn,
    estimate_noise_median,
    eta_bound,
    phi,
    psi,
    recover,
    solve_lambda_nn,
    solve_lambda_weighted,
    solve_lambda_wnn,
)
from .errors import (
    InfeasibleReductionError,
    ParameterError,
    PatchError,
    SvdConvergenceError,
    TrivialSolutionError,
)
from .llr import denoise_llr
from .matrix import SvdFactors, range_finder, svd
from .pipeline import denoise
from .reduced import recover_reduced
from .shrinkage import Regularizer, psvt, svt, wsvt

__version__ = "0.1.0"

__all__ = [
    "DpSolution",
    "InfeasibleReductionError",
    "ParameterError",
    "PatchError",
    "Regularizer",
    "SvdConvergenceError",
    "SvdFactors",
    "TrivialSolutionError",
    "breakpoints_nn",
    "breakpoints_wnn",
    "denoise",
    "denoise_llr",
    "estimate_noise_median",
    "eta_bound",
    "hardt_denoise",
    "phi",
    "psi",
    "psvt",
    "range_finder",
    "recover",
    "recover_reduced",
    "solve_lambda_nn",
    "solve_lambda_weighted",
    "solve_lambda_wnn",
    "sure_denoise",
    "sure_select",
    "sure_value",
    "svd",
    "svt",
    "wsvt",
]
