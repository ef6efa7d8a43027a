"""Integration and sup estimation over the unit disk.

Integrands and sup targets are callables ``g(z, w)`` where ``w = 1 - |z|^2``
is supplied by the grid, computed without cancellation, so that boundary
weights such as ``log(2 / w)`` or ``w ** (p - 2)`` stay accurate right up to
the circle. An integrand may also expose ``polar(radii, w, thetas)`` (where
``thetas`` is either an int, meaning the uniform full circle, or an array of
angles) and a ``bandwidth`` attribute; the quadrature uses these for fast
tensor-grid evaluation.

Area measure ``dA`` is unnormalized Lebesgue measure, so the disk has area pi.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np

TWO_PI = 2 * math.pi
_R_MAX = float(np.nextafter(1.0, 0.0))
_DE_HALF_WIDTH = 4.0
_PATCH_POINTS = 65
_EXTRA_LEVELS = 4
_PATCH_SHRINK = 32.0
_GROWTH_RUNGS = 5
_GROWTH_RATE = 0.01
_LADDER_GL = np.polynomial.legendre.leggauss(16)


class NonFiniteValueError(ArithmeticError):
    """An integrand or sup target produced a NaN or infinity at a grid node."""


def default_ladder() -> tuple[float, ...]:
    return tuple(1 - 2.0**-k for k in range(1, 21))


@dataclass(frozen=True)
class GridSpec:
    n_radial: int = 200
    n_angular: int = 256
    radial_map: str = "boundary_clustered"
    refinement_levels: int = 3
    boundary_ladder: tuple[float, ...] = field(default_factory=default_ladder)
    seed: int = 0xB10C

    def __post_init__(self):
        object.__setattr__(self, "boundary_ladder", tuple(float(r) for r in self.boundary_ladder))
        if self.n_radial < 8 or self.n_angular < 8:
            raise ValueError("node counts must be at least 8")
        if self.radial_map not in ("uniform_r", "boundary_clustered"):
            raise ValueError(f"unknown radial_map {self.radial_map!r}")
        if self.refinement_levels < 0:
            raise ValueError("refinement_levels must be nonnegative")
        lad = self.boundary_ladder
        if not lad or any(not 0 < r < 1 for r in lad) or any(b <= a for a, b in zip(lad, lad[1:])):
            raise ValueError("boundary_ladder must be strictly increasing radii in (0, 1)")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["boundary_ladder"] = list(self.boundary_ladder)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    @classmethod
    def from_dict(cls, data: dict) -> "GridSpec":
        known = {k: data[k] for k in cls.__dataclass_fields__ if k in data}
        if "boundary_ladder" in known:
            known["boundary_ladder"] = tuple(known["boundary_ladder"])
        return cls(**known)

    @classmethod
    def from_json(cls, text: str) -> "GridSpec":
        return cls.from_dict(json.loads(text))

    def ladder_w(self) -> np.ndarray:
        r = np.asarray(self.boundary_ladder)
        return (1 - r) * (1 + r)


@dataclass(frozen=True)
class NormEstimate:
    value: float
    error_estimate: float = 0.0
    converged: bool = True
    witness: complex | None = None
    diverged: bool = False

    def __post_init__(self):
        if not self.value >= 0:
            raise ValueError(f"NormEstimate value must be nonnegative, got {self.value!r}")
        if self.error_estimate < 0:
            raise ValueError("error_estimate must be nonnegative")
        if self.diverged and self.converged:
            object.__setattr__(self, "converged", False)
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "error_estimate", float(self.error_estimate))

    @classmethod
    def exact(cls, value: float, witness: complex | None = None) -> "NormEstimate":
        return cls(float(value), 0.0, True, witness, False)

    def scaled(self, factor: float) -> "NormEstimate":
        factor = abs(factor)
        return replace(self, value=self.value * factor, error_estimate=self.error_estimate * factor)

    def to_dict(self) -> dict:
        w = self.witness
        return {
            "value": _json_float(self.value),
            "error": _json_float(self.error_estimate),
            "converged": bool(self.converged),
            "diverged": bool(self.diverged),
            "witness": None if w is None else [_json_float(w.real), _json_float(w.imag)],
        }


def _json_float(x: float):
    x = float(x)
    return x if math.isfinite(x) else None


Integrand = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _angles(thetas) -> np.ndarray:
    if isinstance(thetas, (int, np.integer)):
        return TWO_PI * np.arange(int(thetas)) / int(thetas)
    return np.asarray(thetas, dtype=float)


def eval_polar(g: Integrand, radii: np.ndarray, w: np.ndarray, thetas) -> np.ndarray:
    """``g`` on the tensor grid ``radii x thetas`` as a real 2-D array."""
    radii = np.minimum(np.asarray(radii, dtype=float), 1.0)
    w = np.asarray(w, dtype=float)
    if hasattr(g, "polar"):
        vals = np.asarray(g.polar(radii, w, thetas), dtype=float)
    else:
        th = _angles(thetas)
        z = radii[:, None] * np.exp(1j * th)[None, :]
        ww = np.broadcast_to(w[:, None], z.shape)
        vals = np.asarray(g(z, ww), dtype=float)
    n_th = int(thetas) if isinstance(thetas, (int, np.integer)) else len(thetas)
    vals = np.broadcast_to(vals, (radii.size, n_th))
    if not np.all(np.isfinite(vals)):
        raise NonFiniteValueError("integrand is not finite at some grid node")
    return vals


def _effective_angular(g, n_angular: int) -> int:
    bw = int(getattr(g, "bandwidth", 0) or 0)
    need = 4 * bw + 4
    m = n_angular
    while m < need:
        m *= 2
    return m


def _expit(s: np.ndarray) -> np.ndarray:
    out = np.empty_like(s)
    pos = s >= 0
    out[pos] = 1 / (1 + np.exp(-s[pos]))
    e = np.exp(s[~pos])
    out[~pos] = e / (1 + e)
    return out


def _de_nodes(t: np.ndarray):
    """Double-exponential map of t onto w in (0, 1): nodes, radii, dw/dt."""
    s = math.pi * np.sinh(t)
    w = _expit(s)
    r2 = _expit(-s)
    dw = math.pi * np.cosh(t) * w * r2
    return w, np.minimum(np.sqrt(r2), _R_MAX), dw


def _converged(err: float, value: float) -> bool:
    return err < max(1e-9, 1e-6 * abs(value))


def _ladder_partials(g: Integrand, spec: GridSpec, m: int) -> np.ndarray:
    """Integrals of ``g`` over the disks ``|z| < rho_k`` for the ladder radii."""
    x, wts = _LADDER_GL
    lad = np.asarray(spec.boundary_ladder)
    edges = np.concatenate([[1.0], 1 - lad])  # distance to the circle
    partial = 0.0
    out = []
    for hi, lo in zip(edges[:-1], edges[1:]):
        d = 0.5 * (hi + lo) + 0.5 * (hi - lo) * x
        r = 1 - d
        w = d * (2 - d)
        vals = eval_polar(g, r, w, m)
        ring = (vals.mean(axis=1) * TWO_PI * r) @ wts * 0.5 * (hi - lo)
        partial += ring
        out.append(partial)
    return np.asarray(out)


def ladder_growing(values: np.ndarray, rungs: int = _GROWTH_RUNGS, rate: float = _GROWTH_RATE) -> bool:
    """True when each of the last ``rungs`` steps grows by more than ``rate``."""
    v = np.abs(np.asarray(values, dtype=float))
    if v.size < rungs + 1:
        return False
    tail = v[-(rungs + 1):]
    prev, nxt = tail[:-1], tail[1:]
    return bool(np.all(prev > 0) and np.all(nxt > prev * (1 + rate)))


def _integrate_de(g: Integrand, spec: GridSpec, m: int):
    n0 = spec.n_radial
    total = 0.0
    total_half = 0.0
    prev = None
    err = math.inf
    value = 0.0
    for level in range(spec.refinement_levels + 1):
        n = (n0 - 1) * 2**level + 1
        t = np.linspace(-_DE_HALF_WIDTH, _DE_HALF_WIDTH, n)
        if level > 0:
            t = t[1::2]
        w, r, dw = _de_nodes(t)
        vals = eval_polar(g, r, w, m)
        total += float(vals.mean(axis=1) @ dw)
        total_half += float(vals[:, ::2].mean(axis=1) @ dw)
        h = 2 * _DE_HALF_WIDTH / (n - 1)
        value = 0.5 * TWO_PI * h * total
        half = 0.5 * TWO_PI * h * total_half
        ang_err = abs(value - half)
        if prev is not None:
            err = abs(value - prev) + ang_err
            if _converged(err, value):
                break
        prev = value
    return value, err


def _integrate_uniform(g: Integrand, spec: GridSpec, m: int):
    prev = None
    err = math.inf
    value = 0.0
    for level in range(spec.refinement_levels + 1):
        n = spec.n_radial * 2**level
        r = (np.arange(n) + 0.5) / n
        w = (1 - r) * (1 + r)
        vals = eval_polar(g, r, w, m)
        value = TWO_PI * float(vals.mean(axis=1) @ r) / n
        if prev is not None:
            err = abs(value - prev)
            if _converged(err, value):
                break
        prev = value
    return value, err


def integrate_area(g: Integrand, spec: GridSpec | None = None) -> NormEstimate:
    """Integral of a nonnegative ``g`` over the disk against area measure."""
    spec = spec or GridSpec()
    m = _effective_angular(g, spec.n_angular)
    if spec.radial_map == "boundary_clustered":
        value, err = _integrate_de(g, spec, m)
    else:
        value, err = _integrate_uniform(g, spec, m)
    partials = _ladder_partials(g, spec, m)
    if ladder_growing(partials):
        return NormEstimate(abs(float(partials[-1])), math.inf, False, None, True)
    return NormEstimate(abs(value), err, _converged(err, value), None, False)


class _InvariantWeight:
    def __init__(self, g: Integrand):
        self.g = g
        self.bandwidth = getattr(g, "bandwidth", 0)
        if hasattr(g, "polar"):
            self.polar = self._polar

    def __call__(self, z, w):
        return self.g(z, w) / w**2

    def _polar(self, radii, w, thetas):
        return self.g.polar(radii, w, thetas) / (w**2)[:, None]


def integrate_invariant(g: Integrand, spec: GridSpec | None = None) -> NormEstimate:
    """Integral against the Mobius invariant measure ``dA / (1 - |z|^2)^2``."""
    return integrate_area(_InvariantWeight(g), spec)


def hyperbolic_distance(z, omega):
    """``log((1 + rho) / (1 - rho))`` with ``rho = |z - omega| / |1 - conj(z) omega|``."""
    z = np.asarray(z, dtype=complex)
    omega = np.asarray(omega, dtype=complex)
    if np.any(np.abs(z) >= 1) or np.any(np.abs(omega) >= 1):
        raise ValueError("points must lie in the open unit disk")
    rho = np.abs(z - omega) / np.abs(1 - np.conj(z) * omega)
    out = np.log1p(rho) - np.log1p(-rho)
    return float(out) if out.ndim == 0 else out


def hyperbolic_window(omega: complex, radius: float) -> tuple[complex, float]:
    """Euclidean center and radius of ``{z : hyperbolic_distance(z, omega) < radius}``."""
    if radius <= 0:
        raise ValueError("window radius must be positive")
    omega = complex(omega)
    if abs(omega) >= 1:
        raise ValueError("window center must lie in the open unit disk")
    rho = math.tanh(radius / 2)
    q = abs(omega) ** 2
    den = 1 - rho * rho * q
    return omega * (1 - rho * rho) / den, rho * (1 - q) / den


def integrate_hyperbolic_window(
    g: Integrand, omega: complex, radius: float, spec: GridSpec | None = None
) -> NormEstimate:
    """Integral of ``g`` dA over the hyperbolic disk of given radius about ``omega``.

    The hyperbolic disk is a Euclidean disk strictly inside the unit disk, so it
    is integrated in polar coordinates about its own center (Gauss-Legendre in
    the radius, trapezoid in the angle).
    """
    spec = spec or GridSpec()
    center, rad = hyperbolic_window(omega, radius)
    m = max(64, _effective_angular(g, spec.n_angular // 4))
    th = TWO_PI * np.arange(m) / m
    ring = np.exp(1j * th)
    prev = None
    err = math.inf
    value = 0.0
    n = 24
    for _level in range(spec.refinement_levels + 1):
        x, wts = np.polynomial.legendre.leggauss(n)
        s = 0.5 * rad * (x + 1)
        z = center + s[:, None] * ring[None, :]
        az = np.abs(z)
        w = (1 - az) * (1 + az)
        vals = np.broadcast_to(np.asarray(g(z, w), dtype=float), z.shape)
        if not np.all(np.isfinite(vals)):
            raise NonFiniteValueError("integrand is not finite at some window node")
        radial = vals.mean(axis=1) * TWO_PI * s
        value = 0.5 * rad * float(radial @ wts)
        half = 0.5 * rad * float((vals[:, ::2].mean(axis=1) * TWO_PI * s) @ wts)
        if prev is not None:
            err = abs(value - prev) + abs(value - half)
            if _converged(err, value):
                break
        prev = value
        n *= 2
    return NormEstimate(abs(value), err, _converged(err, value))


# ---------------------------------------------------------------------------
# sup estimation

@dataclass
class SearchResult:
    value: float
    witness: complex
    last_gain: float
    u: float
    theta: float


def _radii_from_w(w: np.ndarray) -> np.ndarray:
    return np.minimum(np.sqrt(np.clip(1 - w, 0.0, 1.0)), _R_MAX)


def maximize(
    g: Integrand,
    spec: GridSpec | None = None,
    *,
    closed: bool = False,
    sign: float = 1.0,
) -> SearchResult:
    """Grid search for the max of ``sign * g``: coarse polar scan plus boundary
    ladder (plus the unit circle when ``closed``), then local zooming patches
    in ``(log w, theta)`` around the running best point. At least
    ``refinement_levels`` patches are used, plus up to four more while the
    last one still improved the value by more than 1e-9 relative.

    Returns the best value of ``sign * g`` found, so the estimate is biased
    toward the inside of the true extremum.
    """
    spec = spec or GridSpec()
    n_r, m = spec.n_radial, spec.n_angular
    if spec.radial_map == "boundary_clustered":
        w_coarse = (np.arange(n_r) + 0.5) / n_r
        r_coarse = np.sqrt(1 - w_coarse)
    else:
        r_coarse = (np.arange(n_r) + 0.5) / n_r
        w_coarse = (1 - r_coarse) * (1 + r_coarse)
    lad = np.asarray(spec.boundary_ladder)
    w_all = [np.array([1.0]), w_coarse, spec.ladder_w()]
    r_all = [np.array([0.0]), r_coarse, lad]
    if closed:
        w_all.append(np.array([0.0]))
        r_all.append(np.array([1.0]))
    w = np.concatenate(w_all)
    r = np.concatenate(r_all)
    vals = sign * eval_polar(g, r, w, m)
    idx = int(np.argmax(vals))
    i, j = divmod(idx, m)
    best = float(vals[i, j])
    bu, bth = float(w[i]), TWO_PI * j / m
    br = float(r[i])
    witness = br * complex(math.cos(bth), math.sin(bth))

    if bu >= 1.0:
        d_lu, d_th = 2.0 / n_r, math.pi
    elif bu > 0.0:
        d_lu, d_th = min(math.log(2.0), 2.0 / (n_r * bu)), 2 * TWO_PI / m
    else:
        d_lu, d_th = 0.0, 2 * TWO_PI / m

    gain = 0.0
    grid = np.linspace(-1.0, 1.0, _PATCH_POINTS)
    levels = spec.refinement_levels
    max_levels = levels + _EXTRA_LEVELS if levels else 0
    for level in range(max_levels):
        if level >= levels and gain <= 1e-9 * abs(best):
            break
        th = bth + d_th * grid
        if bu > 0.0:
            lu = np.minimum(math.log(bu) + d_lu * grid, 0.0)
            pw = np.exp(lu)
            pr = _radii_from_w(pw)
        else:
            pw, pr = np.array([0.0]), np.array([1.0])
        pv = sign * eval_polar(g, pr, pw, th)
        k = int(np.argmax(pv))
        a, b = divmod(k, th.size)
        cand = float(pv[a, b])
        gain = max(cand - best, 0.0)
        if cand > best:
            best = cand
            bu, bth = float(pw[a]), float(th[b])
            witness = float(pr[a]) * complex(math.cos(bth), math.sin(bth))
        d_lu /= _PATCH_SHRINK
        d_th /= _PATCH_SHRINK
    return SearchResult(best, witness, gain, bu, bth)


def sup_on_disk(g: Integrand, spec: GridSpec | None = None) -> NormEstimate:
    """Lower-biased estimate of ``sup g`` over the open disk with its argmax."""
    res = maximize(g, spec)
    if res.value < 0:
        raise ValueError("sup_on_disk expects a nonnegative target")
    converged = res.last_gain <= 1e-9 * abs(res.value)
    return NormEstimate(res.value, res.last_gain, converged, res.witness)


def circle_maxima(g: Integrand, radii, spec: GridSpec | None = None) -> np.ndarray:
    """Max of ``g`` over each circle ``|z| = r`` sampled at the grid's angles."""
    spec = spec or GridSpec()
    radii = np.asarray(radii, dtype=float)
    w = (1 - radii) * (1 + radii)
    return eval_polar(g, radii, w, spec.n_angular).max(axis=1)
