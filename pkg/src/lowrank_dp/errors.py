"""Exception types raised across the package."""


class ParameterError(ValueError):
    """An argument violates an operation's preconditions."""


class SvdConvergenceError(RuntimeError):
    """The LAPACK singular value routines failed to converge."""

    def __init__(self, shape, drivers, message=""):
        self.shape = tuple(shape)
        self.drivers = tuple(drivers)
        detail = f": {message}" if message else ""
        super().__init__(
            f"SVD of {self.shape[0]}x{self.shape[1]} matrix did not converge "
            f"after {len(self.drivers)} attempt(s) with drivers {list(self.drivers)}{detail}"
        )


class TrivialSolutionError(ValueError):
    """The residual bound admits the zero matrix (``eta >= ||Y||_F^2``)."""

    def __init__(self, eta, norm_sq):
        self.eta = float(eta)
        self.norm_sq = float(norm_sq)
        super().__init__(
            f"eta={self.eta:.6g} >= ||Y||_F^2={self.norm_sq:.6g}; the zero matrix is feasible"
        )


class InfeasibleReductionError(ValueError):
    """Projection onto the range basis discards more energy than the bound allows."""

    def __init__(self, eta, offset, ell):
        self.eta = float(eta)
        self.offset = float(offset)
        self.ell = int(ell)
        super().__init__(
            f"reduced bound eta - a = {self.eta - self.offset:.6g} <= 0 at ell={self.ell}; "
            "increase ell"
        )


class PatchError(RuntimeError):
    """A per-patch recovery failed inside the locally low-rank denoiser."""

    def __init__(self, anchor, cause):
        self.anchor = tuple(anchor)
        super().__init__(f"patch at anchor {self.anchor} failed: {cause}")
        self.__cause__ = cause
