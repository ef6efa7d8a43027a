"""The multiplication operator M_psi: iterates, Cesaro means, norm traces and
operator-norm bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .functions import (
    AnalyticFunction,
    Constant,
    Mobius,
    Polynomial,
    Taylor,
    add,
    is_constant,
    multiply,
    scale,
    series_degree,
    tail_bound,
    value_at_zero,
)
from .norms import (
    SpaceTag,
    bloch_norm,
    sigma_psi,
    space_norm,
    sup_norm_hinf,
)
from .parser import render
from .quadrature import GridSpec, NormEstimate

MAX_TRACE_DEGREE = 8192
MAX_SERIES_TRACE_DEGREE = 2048
TAIL_FRACTION = 0.1

CSV_HEADER = "n,iterate_norm,iterate_err,cesaro_norm,cesaro_err,reference_bound"


def apply_mult(psi: AnalyticFunction, f: AnalyticFunction, degree: int | None = None) -> AnalyticFunction:
    return multiply(psi, f, degree)


@dataclass(frozen=True)
class TraceEntry:
    n: int
    iterate_norm: NormEstimate | None = None
    cesaro_norm: NormEstimate | None = None
    reference_bound: float | None = None

    def csv_row(self) -> str:
        def cells(est):
            if est is None:
                return ["", ""]
            return [repr(est.value), repr(est.error_estimate)]

        ref = "" if self.reference_bound is None else repr(self.reference_bound)
        return ",".join([str(self.n), *cells(self.iterate_norm), *cells(self.cesaro_norm), ref])


@dataclass(frozen=True)
class IterateTrace:
    space: SpaceTag
    psi_id: str
    f_id: str
    entries: tuple[TraceEntry, ...] = ()

    def __post_init__(self):
        ns = [e.n for e in self.entries]
        if any(b <= a for a, b in zip(ns, ns[1:])) or any(n < 1 for n in ns):
            raise ValueError("trace entries must be strictly increasing in n >= 1")

    @property
    def reference_bound(self) -> list[float] | None:
        refs = [e.reference_bound for e in self.entries]
        return None if all(r is None for r in refs) else refs

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(e, name).value for e in self.entries])

    def to_csv(self) -> str:
        return "\n".join([CSV_HEADER, *(e.csv_row() for e in self.entries)]) + "\n"


def _trace_degree(psi: AnalyticFunction, f: AnalyticFunction, N: int) -> int:
    need = N * series_degree(psi) + series_degree(f)
    if all(isinstance(g, (Constant, Polynomial)) for g in (psi, f)):
        return min(MAX_TRACE_DEGREE, max(256, need))
    return min(MAX_SERIES_TRACE_DEGREE, max(256, need))


def _flag_tail(est: NormEstimate, g: AnalyticFunction) -> NormEstimate:
    t = tail_bound(g)
    if t is None or t > TAIL_FRACTION * est.value:
        if t is None or t > 0:
            return NormEstimate(est.value, est.error_estimate, False, est.witness, est.diverged)
    return est


def _norm(g: AnalyticFunction, space: SpaceTag, spec: GridSpec) -> NormEstimate:
    return _flag_tail(space_norm(g, space, spec), g)


def _constant_value(psi: AnalyticFunction) -> complex | None:
    if isinstance(psi, Constant):
        return psi.value
    if is_constant(psi):
        return value_at_zero(psi)
    return None


def _cesaro_factor(xi: complex, n: int) -> complex:
    if xi == 1:
        return 1.0
    return xi * (1 - xi**n) / ((1 - xi) * n)


def reference_bound(psi: AnalyticFunction, n: int, f_norm: float = 1.0) -> float | None:
    """``4 ||f|| / (n |1 - xi|)`` for a constant symbol ``xi != 1`` with ``|xi| <= 1``."""
    xi = _constant_value(psi)
    if xi is None or xi == 1 or abs(xi) > 1:
        return None
    return 4 * f_norm / (n * abs(1 - xi))


def full_trace(
    psi: AnalyticFunction,
    f: AnalyticFunction,
    space: SpaceTag,
    N: int,
    spec: GridSpec | None = None,
    *,
    iterates: bool = True,
    cesaro: bool = True,
) -> IterateTrace:
    """Norms of ``psi^n f`` and of ``(1/n) sum_{m<=n} psi^m f`` for ``n = 1..N``."""
    if int(N) != N or N < 1:
        raise ValueError("N must be a positive integer")
    N = int(N)
    spec = spec or GridSpec()
    entries = []
    xi = _constant_value(psi)
    if xi is not None:
        # homogeneity: every space norm scales by the modulus of the constant
        f_norm = _norm(f, space, spec)
        for n in range(1, N + 1):
            it = f_norm.scaled(abs(xi) ** n) if iterates else None
            ce = f_norm.scaled(abs(_cesaro_factor(xi, n))) if cesaro else None
            ref = reference_bound(psi, n, f_norm.value) if cesaro else None
            entries.append(TraceEntry(n, it, ce, ref))
    else:
        deg = _trace_degree(psi, f, N)
        term = f
        total: AnalyticFunction = Constant(0)
        for n in range(1, N + 1):
            term = multiply(psi, term, deg)
            it = _norm(term, space, spec) if iterates else None
            ce = None
            if cesaro:
                total = add(total, term, deg)
                ce = _norm(scale(total, 1.0 / n, deg), space, spec)
            entries.append(TraceEntry(n, it, ce, None))
    return IterateTrace(space, render(psi), render(f), tuple(entries))


def iterate_trace(psi, f, space: SpaceTag, N: int, spec: GridSpec | None = None) -> IterateTrace:
    return full_trace(psi, f, space, N, spec, cesaro=False)


def cesaro_trace(psi, f, space: SpaceTag, N: int, spec: GridSpec | None = None) -> IterateTrace:
    return full_trace(psi, f, space, N, spec, iterates=False)


def bloch_opnorm_bounds(
    psi: AnalyticFunction, spec: GridSpec | None = None
) -> tuple[NormEstimate, NormEstimate]:
    """``max(||psi||_B, ||psi||_inf) <= ||M_psi|| <= max(||psi||_B, ||psi||_inf + sigma_psi)``."""
    spec = spec or GridSpec()
    b = bloch_norm(psi, spec)[0]
    h = sup_norm_hinf(psi, spec)
    s = sigma_psi(psi, spec)
    lower = b if b.value >= h.value else h
    hs = NormEstimate(
        h.value + s.value,
        h.error_estimate + s.error_estimate,
        h.converged and s.converged,
        h.witness,
        h.diverged or s.diverged,
    )
    upper = b if b.value >= hs.value else hs
    return lower, upper


@dataclass(frozen=True)
class Dictionary:
    """Test functions with their norms in one space, for operator-norm probes."""

    space: SpaceTag
    members: tuple[tuple[AnalyticFunction, float], ...] = field(default=())

    def __post_init__(self):
        if not self.members:
            raise ValueError("dictionary must be nonempty")
        for f, norm in self.members:
            if not norm > 0:
                raise ValueError(f"dictionary member {render(f)!r} has zero norm")

    @classmethod
    def build(cls, functions, space: SpaceTag, spec: GridSpec | None = None, *, drop_null=False):
        spec = spec or GridSpec()
        members = []
        for f in functions:
            norm = space_norm(f, space, spec).value
            if norm > 0 or not drop_null:
                members.append((f, norm))
        return cls(space, tuple(members))


def default_functions(degree: int = 64) -> list[AnalyticFunction]:
    geometric = Taylor(0.5 ** np.arange(degree + 1), 0.5**degree)
    return [
        Constant(1),
        Polynomial([0, 1]),
        Polynomial([0, 0, 1]),
        Mobius(0.5),
        geometric,
    ]


def default_dictionary(space: SpaceTag, spec: GridSpec | None = None) -> Dictionary:
    """``{1, z, z^2, mobius 0.5, 1/(1 - z/2) truncated}``, each normalized.

    Members with zero norm (possible for the seminorm on besov1) are dropped.
    """
    spec = spec or GridSpec()
    fs = []
    for f in default_functions():
        norm = space_norm(f, space, spec).value
        if norm > 0:
            fs.append(scale(f, 1.0 / norm))
    return Dictionary.build(fs, space, spec)


def _pow(x: float, n: int) -> float:
    try:
        return x**n
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class ProbeEntry:
    n: int
    lower_bound: float
    with_hinf: float


def opnorm_lower_probe(
    psi: AnalyticFunction,
    space: SpaceTag,
    N: int,
    dictionary: Dictionary,
    spec: GridSpec | None = None,
) -> list[ProbeEntry]:
    """``max_f ||psi^n f|| / ||f||`` over the dictionary, and its max with ``||psi||_inf^n``."""
    if int(N) != N or N < 1:
        raise ValueError("N must be a positive integer")
    N = int(N)
    spec = spec or GridSpec()
    hinf = sup_norm_hinf(psi, spec).value
    best = np.zeros(N)
    xi = _constant_value(psi)
    for f, f_norm in dictionary.members:
        if xi is not None:
            with np.errstate(over="ignore"):
                best = np.maximum(best, abs(xi) ** np.arange(1, N + 1, dtype=float))
            continue
        trace = iterate_trace(psi, f, space, N, spec)
        best = np.maximum(best, trace.column("iterate_norm") / f_norm)
    out = []
    for n in range(1, N + 1):
        with_hinf = max(float(best[n - 1]), _pow(hinf, n))
        out.append(ProbeEntry(n, float(best[n - 1]), with_hinf))
    return out
