"""Best achievable expected payoff of a random dart as a function of distance."""

__version__ = "0.1.0"

from .darts import (Affine, Arcsine1D, Atomic, Cantor1D, Cauchy1D, Dart, GridUniform1D,
                    IndepSum, Mixture, Normal1D, SemiCircle1D, TentCF1D, Uniform1D,
                    UniformDisc2D, UnsupportedOperation, bern, cf, project, sample)
from .expectation import EvalResult, EvalSpec, expect, expect_cos_closed
from .optimizer import AimResult, GCurve, best_aim, dartboard_sweep, g_curve
from .parsing import parse_dart, parse_payoff, render_dart, render_payoff

__all__ = [
    "Affine", "Arcsine1D", "Atomic", "Cantor1D", "Cauchy1D", "Dart", "GridUniform1D",
    "IndepSum", "Mixture", "Normal1D", "SemiCircle1D", "TentCF1D", "Uniform1D",
    "UniformDisc2D", "UnsupportedOperation", "bern", "cf", "project", "sample",
    "EvalResult", "EvalSpec", "expect", "expect_cos_closed",
    "AimResult", "GCurve", "best_aim", "dartboard_sweep", "g_curve",
    "parse_dart", "parse_payoff", "render_dart", "render_payoff",
]
