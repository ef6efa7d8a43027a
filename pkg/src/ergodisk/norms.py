"""Bloch, little Bloch and Besov norms, seminorms and integral conditions."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import partial
from typing import Callable, Iterable, Union

import numpy as np

from .functions import (
    AnalyticFunction,
    Constant,
    closed_disk,
    derivative,
    evaluate,
    evaluate_on_circles,
    evaluate_polar,
    series_degree,
    tail_bound,
    value_at_zero,
)
from .quadrature import (
    GridSpec,
    NormEstimate,
    _effective_angular,
    _ladder_partials,
    integrate_area,
    integrate_hyperbolic_window,
    ladder_growing,
    maximize,
    sup_on_disk,
)

# Ladder circles beyond which an unknown-tail series is not trusted: the
# first neglected term would weigh more than this at that radius.
RESOLUTION = 1e-3


@dataclass(frozen=True)
class Bloch:
    label = "bloch"


@dataclass(frozen=True)
class LittleBloch:
    label = "little-bloch"


@dataclass(frozen=True)
class Besov:
    p: float

    def __post_init__(self):
        p = float(self.p)
        if not 1 < p < math.inf:
            raise ValueError(f"Besov exponent must satisfy 1 < p < inf, got {self.p!r}")
        object.__setattr__(self, "p", p)

    @property
    def label(self) -> str:
        return f"besov(p={self.p!r})"


@dataclass(frozen=True)
class BesovOne:
    label = "besov1"


SpaceTag = Union[Bloch, LittleBloch, Besov, BesovOne]


def parse_space(name: str, p: float | None = None) -> SpaceTag:
    name = name.lower()
    if name == "bloch":
        return Bloch()
    if name in ("little-bloch", "little_bloch", "littlebloch"):
        return LittleBloch()
    if name == "besov":
        if p is None:
            raise ValueError("the besov space needs an exponent p")
        return Besov(p)
    if name == "besov1":
        return BesovOne()
    raise ValueError(f"unknown space {name!r}")


# ---------------------------------------------------------------------------
# weighted modulus fields

def _unit(r, w):
    return np.ones_like(w)


def _bloch_weight(r, w):
    return w


def _sigma_weight(r, w):
    # log((1+r)/(1-r)) = 2 log(1+r) - log(1-r^2)
    return 0.5 * w * (2 * np.log1p(r) - np.log(w))


def _besov_weight(p, r, w):
    return w ** (p - 2)


def _log_carleson_weight(p, r, w):
    return w ** (p - 2) * np.log(2 / w) ** (p - 1)


def _necessary_weight(p, r, w):
    return w * np.log(2 / w) ** (1 - 1 / p)


def _growth_weight(norm, exponent, r, w):
    return 1.0 / (norm * np.log(2 / w) ** exponent)


@dataclass(frozen=True)
class ModulusField:
    """``weight(|z|, 1-|z|^2) * (|func(z) - offset| + pad) ** power`` on the disk."""

    func: AnalyticFunction
    weight: Callable[[np.ndarray, np.ndarray], np.ndarray]
    power: float = 1.0
    offset: complex = 0j
    pad: float = 0.0

    @property
    def bandwidth(self) -> int:
        return int(math.ceil(self.power * series_degree(self.func) / 2))

    def _apply(self, vals, r, w):
        mod = np.abs(vals - self.offset) if self.offset else np.abs(vals)
        if self.pad:
            mod = mod + self.pad
        if self.power != 1:
            mod = mod**self.power
        return self.weight(r, w) * mod

    def __call__(self, z, w):
        return self._apply(evaluate(self.func, z), np.abs(z), w)

    def polar(self, radii, w, thetas):
        if isinstance(thetas, (int, np.integer)):
            vals = evaluate_on_circles(self.func, radii, int(thetas))
        else:
            vals = evaluate_polar(self.func, radii, thetas)
        return self._apply(vals, radii[:, None], w[:, None])


def _vanishes(f: AnalyticFunction) -> bool:
    return isinstance(f, Constant) and f.value == 0


def _known_tail(f: AnalyticFunction) -> float:
    t = tail_bound(f)
    return 0.0 if t is None else t


def resolved_ladder(f: AnalyticFunction, spec: GridSpec) -> np.ndarray:
    """Ladder radii where ``f`` is trusted (all of them unless the tail is unknown)."""
    lad = np.asarray(spec.boundary_ladder)
    if closed_disk(f):
        return lad
    ok = lad ** len(f.coeffs) <= RESOLUTION
    return lad[ok] if ok.any() else lad[:1]


def _ladder_witness(g, radii: np.ndarray, spec: GridSpec) -> tuple[np.ndarray, complex]:
    w = (1 - radii) * (1 + radii)
    from .quadrature import eval_polar

    vals = eval_polar(g, radii, w, spec.n_angular)
    maxima = vals.max(axis=1)
    i = int(np.argmax(maxima))
    j = int(np.argmax(vals[i]))
    th = 2 * math.pi * j / spec.n_angular
    return maxima, complex(radii[i] * math.cos(th), radii[i] * math.sin(th))


# ---------------------------------------------------------------------------
# norms

def sup_norm_hinf(f: AnalyticFunction, spec: GridSpec | None = None) -> NormEstimate:
    """``sup |f|`` over the disk, via circle maxima (maximum modulus principle)."""
    spec = spec or GridSpec()
    if isinstance(f, Constant):
        return NormEstimate.exact(abs(f.value))
    g = ModulusField(f, _unit)
    if closed_disk(f):
        res = maximize(g, spec, closed=True)
        converged = res.last_gain <= 1e-9 * res.value
        return NormEstimate(res.value, res.last_gain + _known_tail(f), converged, res.witness)
    radii = resolved_ladder(f, spec)
    maxima, witness = _ladder_witness(g, radii, spec)
    if ladder_growing(maxima):
        return NormEstimate(float(maxima.max()), math.inf, False, witness, True)
    err = abs(float(maxima[-1] - maxima[-2])) if maxima.size > 1 else math.inf
    converged = maxima.size > 1 and err <= 1e-9 * float(maxima.max())
    return NormEstimate(float(maxima.max()), err, converged, witness)


def bloch_seminorm(f: AnalyticFunction, spec: GridSpec | None = None) -> NormEstimate:
    spec = spec or GridSpec()
    d = derivative(f)
    if _vanishes(d):
        return NormEstimate.exact(0.0, 0j)
    est = sup_on_disk(ModulusField(d, _bloch_weight), spec)
    return NormEstimate(est.value, est.error_estimate + _known_tail(d), est.converged, est.witness)


def bloch_norm(f: AnalyticFunction, spec: GridSpec | None = None) -> tuple[NormEstimate, NormEstimate]:
    """``(|f(0)| + beta_f, beta_f)`` with ``beta_f = sup (1-|z|^2)|f'(z)|``."""
    semi = bloch_seminorm(f, spec)
    norm = NormEstimate(
        abs(value_at_zero(f)) + semi.value, semi.error_estimate, semi.converged, semi.witness
    )
    return norm, semi


def little_bloch_limsup(f: AnalyticFunction, spec: GridSpec | None = None) -> NormEstimate:
    """``limsup_{|z|->1} (1-|z|^2)|f'(z)|`` extrapolated from the ladder circles."""
    spec = spec or GridSpec()
    d = derivative(f)
    if _vanishes(d):
        return NormEstimate.exact(0.0)
    g = ModulusField(d, _bloch_weight)
    radii = resolved_ladder(d, spec)
    maxima, witness = _ladder_witness(g, radii, spec)
    w = (1 - radii) * (1 + radii)
    if radii.size >= 3:
        slope, intercept = np.polyfit(w[-3:], maxima[-3:], 1)
        value = max(float(intercept), 0.0)
    else:
        value = float(maxima[-1])
    err = abs(float(maxima[-1]) - value) + _known_tail(d)
    return NormEstimate(value, err, radii.size >= 3, witness)


def sigma_psi(psi: AnalyticFunction, spec: GridSpec | None = None) -> NormEstimate:
    """``sup (1/2)(1-|z|^2)|psi'(z)| log((1+|z|)/(1-|z|))``."""
    spec = spec or GridSpec()
    d = derivative(psi)
    if _vanishes(d):
        return NormEstimate.exact(0.0, 0j)
    est = sup_on_disk(ModulusField(d, _sigma_weight), spec)
    # the weight itself never exceeds 0.45
    return NormEstimate(est.value, est.error_estimate + 0.45 * _known_tail(d), est.converged, est.witness)


def _integral_of_modulus(
    d: AnalyticFunction, weight, power: float, spec: GridSpec
) -> NormEstimate:
    if _vanishes(d):
        return NormEstimate.exact(0.0)
    field = ModulusField(d, weight, power)
    if not closed_disk(d):
        return _integral_unknown_tail(field, spec)
    est = integrate_area(field, spec)
    tail = _known_tail(d)
    if tail > 0 and not est.diverged:
        upper = integrate_area(ModulusField(d, weight, power, pad=tail), spec)
        est = NormEstimate(
            est.value, est.error_estimate + max(upper.value - est.value, 0.0), est.converged
        )
    return est


def _integral_unknown_tail(field: ModulusField, spec: GridSpec) -> NormEstimate:
    # Only the ladder disks where the stored coefficients are trusted take part
    # in the divergence test, and the mass outside the last of them is
    # counted as error.
    radii = resolved_ladder(field.func, spec)
    trusted = replace(spec, boundary_ladder=tuple(radii))
    est = integrate_area(field, trusted)
    if est.diverged:
        return est
    inner = float(_ladder_partials(field, trusted, _effective_angular(field, spec.n_angular))[-1])
    err = est.error_estimate + abs(est.value - inner)
    return NormEstimate(est.value, err, err < max(1e-9, 1e-6 * est.value))


def _root(est: NormEstimate, p: float) -> NormEstimate:
    value = est.value ** (1 / p)
    if math.isfinite(est.error_estimate):
        err = (est.value + est.error_estimate) ** (1 / p) - value
    else:
        err = math.inf
    return NormEstimate(value, err, est.converged, est.witness, est.diverged)


def besov_seminorm(f: AnalyticFunction, p: float, spec: GridSpec | None = None) -> NormEstimate:
    """``gamma_f = (int |f'|^p (1-|z|^2)^(p-2) dA)^(1/p)``."""
    spec = spec or GridSpec()
    p = Besov(p).p
    return _root(_integral_of_modulus(derivative(f), partial(_besov_weight, p), p, spec), p)


def besov_norm(
    f: AnalyticFunction, p: float, spec: GridSpec | None = None
) -> tuple[NormEstimate, NormEstimate]:
    semi = besov_seminorm(f, p, spec)
    norm = NormEstimate(
        abs(value_at_zero(f)) + semi.value,
        semi.error_estimate,
        semi.converged,
        semi.witness,
        semi.diverged,
    )
    return norm, semi


def besov1_seminorm(f: AnalyticFunction, spec: GridSpec | None = None) -> NormEstimate:
    """``int |f''| dA`` (vanishes on polynomials of degree one)."""
    spec = spec or GridSpec()
    return _integral_of_modulus(derivative(f, 2), _unit, 1.0, spec)


def condition_31(psi: AnalyticFunction, p: float, spec: GridSpec | None = None) -> NormEstimate:
    """``int (1-|z|^2)^(p-2) |psi'|^p (log(2/(1-|z|^2)))^(p-1) dA``.

    Finiteness makes ``psi`` a bounded multiplier of the Besov space and
    pins its spectrum to the closure of its range.
    """
    spec = spec or GridSpec()
    p = Besov(p).p
    return _integral_of_modulus(derivative(psi), partial(_log_carleson_weight, p), p, spec)


def default_omega_grid() -> list[complex]:
    radii = [1 - 2.0**-k for k in range(1, 9)]
    return [r * complex(math.cos(2 * math.pi * j / 8), math.sin(2 * math.pi * j / 8))
            for r in radii for j in range(8)]


def carleson_window_sup(
    psi: AnalyticFunction,
    p: float,
    r: float,
    omega_grid: Iterable[complex] | None = None,
    spec: GridSpec | None = None,
) -> NormEstimate:
    """Max over ``omega_grid`` of the log-Carleson integral on hyperbolic disks."""
    spec = spec or GridSpec()
    p = Besov(p).p
    omegas = list(default_omega_grid() if omega_grid is None else omega_grid)
    if not omegas:
        raise ValueError("omega_grid must be nonempty")
    d = derivative(psi)
    if _vanishes(d):
        return NormEstimate.exact(0.0, omegas[0])
    field = ModulusField(d, partial(_log_carleson_weight, p), p)
    best = None
    for omega in omegas:
        est = integrate_hyperbolic_window(field, omega, r, spec)
        if best is None or est.value > best[0].value:
            best = (est, omega)
    est, omega = best
    return NormEstimate(est.value, est.error_estimate, est.converged, complex(omega))


def necessary_multiplier_sup(
    psi: AnalyticFunction, p: float, spec: GridSpec | None = None
) -> NormEstimate:
    """Ladder profile of ``(1-|z|^2)|psi'| (log(2/(1-|z|^2)))^(1-1/p)``.

    Multipliers of the Besov space keep this bounded; ``diverged`` reports
    steady growth along the ladder.
    """
    spec = spec or GridSpec()
    p = Besov(p).p
    d = derivative(psi)
    if _vanishes(d):
        return NormEstimate.exact(0.0)
    g = ModulusField(d, partial(_necessary_weight, p))
    radii = resolved_ladder(d, spec)
    maxima, witness = _ladder_witness(g, radii, spec)
    if ladder_growing(maxima):
        return NormEstimate(float(maxima.max()), math.inf, False, witness, True)
    inner = sup_on_disk(g, spec)
    value = max(inner.value, float(maxima.max()))
    return NormEstimate(value, inner.error_estimate, inner.converged, inner.witness)


def growth_ratio(f: AnalyticFunction, space: SpaceTag, spec: GridSpec | None = None) -> NormEstimate:
    """Empirical constant in the pointwise growth bound of the space.

    Bloch: ``sup |f(z)| / (||f|| log(2/(1-|z|^2)))``; Besov(p): the same with
    the logarithm raised to ``1 - 1/p``.
    """
    spec = spec or GridSpec()
    if isinstance(space, (Bloch, LittleBloch)):
        norm = bloch_norm(f, spec)[0].value
        exponent = 1.0
    elif isinstance(space, Besov):
        norm = besov_norm(f, space.p, spec)[0].value
        exponent = 1 - 1 / space.p
    else:
        raise ValueError("growth_ratio is defined for the Bloch and Besov(p) spaces")
    if norm == 0:
        raise ZeroDivisionError("growth ratio of a function with zero norm")
    return sup_on_disk(ModulusField(f, partial(_growth_weight, norm, exponent)), spec)


def space_norm(f: AnalyticFunction, space: SpaceTag, spec: GridSpec | None = None) -> NormEstimate:
    if isinstance(space, (Bloch, LittleBloch)):
        return bloch_norm(f, spec)[0]
    if isinstance(space, Besov):
        return besov_norm(f, space.p, spec)[0]
    if isinstance(space, BesovOne):
        return besov1_seminorm(f, spec)
    raise TypeError(f"unknown space {space!r}")
