"""Fréchet means on non-Euclidean spaces: exact solvers, Monte Carlo risk
harness, and two-point lower-bound experiments."""
from .core import (WHOLE_SPACE, EmpiricalMeasure, MeanSet, MetricSpaceHandle, ModulationCurve,
                   RhoFunction, RiskReport, Sampler, fit_rate, frechet_value, rate_estimate, risk,
                   risk_curve, variance_modulation)
from .errors import (AntipodalPoint, DegenerateEigengap, DegenerateRegression, Empty,
                     EstimatorError, FrechetLabError, InvalidDensity, InvalidInput, MaxIterations,
                     OutOfDomain, OutOfRegime, TooLarge)

__all__ = [
    "WHOLE_SPACE", "EmpiricalMeasure", "MeanSet", "MetricSpaceHandle", "ModulationCurve",
    "RhoFunction", "RiskReport", "Sampler", "fit_rate", "frechet_value", "rate_estimate", "risk",
    "risk_curve", "variance_modulation", "AntipodalPoint", "DegenerateEigengap",
    "DegenerateRegression", "Empty", "EstimatorError", "FrechetLabError", "InvalidDensity",
    "InvalidInput", "MaxIterations", "OutOfDomain", "OutOfRegime", "TooLarge",
]
