"""Numerical toolkit for weight-n Eisenstein series on Gamma_0(q) with squarefree q.

Submodules: specfun (special functions), geometry (SL2(R) coordinates,
cusps, heights), scattering (scattering matrix and weight factor),
eisenstein (evaluators and oracles), truncation (truncation operator and
norms), harness (sweeps and suites) and cli.
"""

__version__ = "0.1.0"

from .errors import (AccuracyError, ConditioningError, ConfigError, DomainError, EisensupError,  # noqa: E402
                     PoleError)

__all__ = ["__version__", "AccuracyError", "ConditioningError", "ConfigError", "DomainError",
           "EisensupError", "PoleError"]
