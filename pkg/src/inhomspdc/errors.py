"""Exception types raised by the simulation library and CLI."""


class ConfigurationError(ValueError):
    """Invalid physical parameters, mismatched lists, or bad config fields."""


class UnsupportedConfigurationError(ConfigurationError):
    """A valid configuration that a particular operation does not cover."""


class DegenerateAnalyzerError(ValueError):
    """Both analyzer projections vanish, so v_pol is undefined."""


class OracleSamplingError(RuntimeError):
    """The requested quadrature cannot resolve the integrand's phase."""


class OracleConvergenceError(RuntimeError):
    """Doubling the quadrature resolution changed the result by more than the target.

    Both estimates are kept on the exception for diagnostics.
    """

    def __init__(self, message, coarse, fine):
        super().__init__(f"{message} (coarse={coarse!r}, fine={fine!r})")
        self.coarse = coarse
        self.fine = fine
