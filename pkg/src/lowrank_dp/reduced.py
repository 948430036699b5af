"""Randomized reduced problems.

With an orthonormal ``Q`` (n x ell) and ``X = A Q^T``,

    ||Y - X||_F^2 = ||Y Q - A||_F^2 + a,    a = ||Y||_F^2 - ||Y Q||_F^2,

so the bound on the small m x ell problem is ``eta - a``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discrepancy import DpSolution, recover
from .errors import InfeasibleReductionError, ParameterError
from .matrix import RangeBasis, as_matrix, frobenius_sq, range_finder

__all__ = [
    "ReducedProblem",
    "reduce",
    "lift",
    "recover_reduced",
    "reduced_noise_level",
    "default_ell",
]


@dataclass(frozen=True)
class ReducedProblem:
    y_proj: np.ndarray
    basis: RangeBasis
    a: float
    eta: float
    eta_hat: float

    @property
    def feasible(self):
        return self.eta_hat > 0


def reduce(y, basis: RangeBasis, eta):
    """Project ``y`` onto ``basis`` and shift the residual bound."""
    y = as_matrix(y)
    if basis.q.shape[0] != y.shape[1]:
        raise ParameterError(
            f"basis has {basis.q.shape[0]} rows but y has {y.shape[1]} columns"
        )
    y_proj = y @ basis.q
    a = frobenius_sq(y) - frobenius_sq(y_proj)
    return ReducedProblem(y_proj, basis, a, float(eta), float(eta) - a)


def lift(a_mat, basis: RangeBasis):
    return np.asarray(a_mat) @ basis.q.T


def default_ell(m, n, rho, offset=5):
    """``round(rho max(m, n)) + offset``, capped at ``min(m, n)``."""
    s = int(np.floor(rho * max(m, n) + 0.5))
    return min(s + offset, min(m, n))


def reduced_noise_level(problem: ReducedProblem):
    """Noise standard deviation implied for the m x ell reduced matrix.

    The adjusted bound divided by the number of reduced entries is a
    per-entry variance; its square root is returned.
    """
    rows, ell = problem.y_proj.shape
    if not problem.feasible:
        raise InfeasibleReductionError(problem.eta, problem.a, ell)
    return float(np.sqrt(problem.eta_hat / (rows * ell)))


def recover_reduced(y, reg=None, eta=None, ell=None, power_iters=2, seed=0, *, tau=None):
    """Discrepancy-principle recovery on the randomized reduced problem.

    Builds ``Q``, solves the m x ell problem with bound ``eta - a`` and
    lifts ``X = A Q^T``. ``residual_sq`` of the result refers to the full
    residual ``||Y - X||_F^2``.

    Raises
    ------
    InfeasibleReductionError
        If ``eta - a <= 0``; ``ell`` must grow.
    """
    y = as_matrix(y)
    if ell is None:
        raise ParameterError("ell is required")
    if eta is None or not eta > 0:
        raise ParameterError(f"eta must be > 0, got {eta}")
    basis = range_finder(y, ell, power_iters, seed)
    problem = reduce(y, basis, eta)
    if not problem.feasible:
        raise InfeasibleReductionError(eta, problem.a, ell)
    sol = recover(problem.y_proj, reg, problem.eta_hat, tau=tau)
    x = lift(sol.x_hat, basis)
    return DpSolution(
        lam=sol.lam,
        k=sol.k,
        eta=float(eta),
        residual_sq=sol.residual_sq + problem.a,
        x_hat=x,
        trivial=sol.trivial,
    )
