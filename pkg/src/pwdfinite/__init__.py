"""Moment-based reconstruction of piecewise D-finite signals.

A signal that solves ``D f = 0`` on each piece of ``[a, b]`` has power
moments satisfying a linear recurrence whose coefficients depend linearly on
the coefficients of ``D``. Inverting that relation recovers the operator, the
jump points and finally the signal from finitely many moments.
"""

from .diffop import DiffOperator, Jet
from .inversion import InsufficientMoments, Model, ReconstructionResult, reconstruct
from .polynomial import Poly
from .shiftops import MomentSequence, ShiftOperator, annihilator, dmop
from .signals import PiecewiseSignal, SampledSignal, moments_exact, moments_quadrature

__all__ = [
    "DiffOperator",
    "InsufficientMoments",
    "Jet",
    "Model",
    "MomentSequence",
    "PiecewiseSignal",
    "Poly",
    "ReconstructionResult",
    "SampledSignal",
    "ShiftOperator",
    "annihilator",
    "dmop",
    "moments_exact",
    "moments_quadrature",
    "reconstruct",
]
