"""Exception types raised by the solvers."""


class DegenerateDirectionError(ValueError):
    """H_RR^H x_r is numerically zero; the projector is undefined."""


class DegenerateEigengapError(ValueError):
    """Top eigenvalue is not simple; the eigenvalue gradient is undefined.

    Callers should perturb x_r slightly and retry.
    """


class UnstableLoopError(RuntimeError):
    """The relay feedback loop has spectral radius >= 1; simulation diverges."""


class MonotonicityError(RuntimeError):
    """A block update increased the penalized merit beyond the allowed slack."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""
