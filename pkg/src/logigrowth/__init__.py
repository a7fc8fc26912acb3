"""Logistic-growth production functions, symmetry checks, profit maximization and calibration."""

__version__ = "0.1.0"

from .errors import (ConvergenceError, DataError, DegenerateError, DomainError, FitError,
                     LogiGrowthError, PoleError, PreconditionError, SingularityError,
                     UndefinedSteadyStateError, UnsupportedFamilyError)
from .growth import GrowthLaw, GrowthModel, ShockSpec, flow, infinitesimal, shock_response
from .production import (CobbDouglas, Capasso, ForcedExponential, LogisticBoth, LogisticKOnly,
                         LogisticLOnly, LogisticOne, Sigma1Params, WageShareCompatible,
                         evaluate, marginal_products, mrts, sigma1, steady_state)
