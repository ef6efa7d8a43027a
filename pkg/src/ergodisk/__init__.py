"""Numerical laboratory for multiplication operators on Bloch and Besov spaces
of the unit disk: norms, iterate and Cesaro-mean traces, and ergodic verdicts."""

from .functions import (
    AnalyticFunction,
    Constant,
    Mobius,
    Polynomial,
    Taylor,
    add,
    cesaro_symbol,
    derivative,
    evaluate,
    multiply,
    power,
    scale,
)
from .parser import parse_spec, render
from .quadrature import GridSpec, NormEstimate

__all__ = [
    "AnalyticFunction",
    "Constant",
    "GridSpec",
    "Mobius",
    "NormEstimate",
    "Polynomial",
    "Taylor",
    "add",
    "cesaro_symbol",
    "derivative",
    "evaluate",
    "multiply",
    "parse_spec",
    "power",
    "render",
    "scale",
]
