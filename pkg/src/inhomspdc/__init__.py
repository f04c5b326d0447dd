"""Two-photon state functions and polarization interference for SPDC in
cascaded crystals with inhomogeneous nonlinearity."""

__version__ = "0.1.0"
