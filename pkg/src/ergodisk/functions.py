"""Holomorphic functions on the unit disk and their coefficient algebra.

Four representations are supported: constants, polynomials, truncated Taylor
series and disk automorphisms. Series arithmetic is done on coefficient
arrays (ascending degree) and truncated at a configurable degree; the mass of
the discarded coefficients is carried along as ``tail_bound`` so that
downstream estimates can report it.

A ``tail_bound`` of ``None`` means the tail is unknown: the stored
coefficients are a sample of a series whose behaviour at the boundary is not
controlled, and the function may only be evaluated in the open disk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

DEFAULT_DEGREE = 256
CONSTANT_ATOL = 1e-14
ROTATION_ATOL = 1e-12
_BOUNDARY_SLACK = 1e-12


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=complex).ravel()
    if arr.size == 0:
        arr = np.zeros(1, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise ValueError("coefficients must be finite")
    arr.setflags(write=False)
    return arr


def _trim(arr: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(arr)
    if nz.size == 0:
        return arr[:1]
    return arr[: nz[-1] + 1]


@dataclass(frozen=True)
class Constant:
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise ValueError("constant must be finite")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True, eq=False)
class Polynomial:
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(_trim(_frozen(self.coeffs))))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True, eq=False)
class Taylor:
    """Truncated power series ``sum_{k<=N} c_k z^k``.

    ``tail_bound`` bounds ``sum_{k>N} |c_k|``, i.e. the sup over the closed
    disk of the omitted part; ``None`` marks an unknown tail.
    """

    coeffs: np.ndarray
    tail_bound: float | None = 0.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(self.coeffs))
        if self.tail_bound is not None:
            t = float(self.tail_bound)
            if not t >= 0:
                raise ValueError("tail_bound must be a nonnegative real or None")
            object.__setattr__(self, "tail_bound", t)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class Mobius:
    """``rotation * (a - z) / (1 - conj(a) z)``, an automorphism of the disk."""

    a: complex
    rotation: complex = field(default=1 + 0j)

    def __post_init__(self):
        a, rot = complex(self.a), complex(self.rotation)
        if not abs(a) < 1:
            raise ValueError(f"Mobius parameter must satisfy |a| < 1, got |a| = {abs(a)!r}")
        if abs(abs(rot) - 1) > ROTATION_ATOL:
            raise ValueError("Mobius rotation must be unimodular")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "rotation", rot)


AnalyticFunction = Union[Constant, Polynomial, Taylor, Mobius]


# ---------------------------------------------------------------------------
# coefficient views

def _mobius_series(f: Mobius, degree: int) -> tuple[np.ndarray, float]:
    a, q = f.a, abs(f.a)
    k = np.arange(1, degree + 1)
    c = np.empty(degree + 1, dtype=complex)
    c[0] = a
    if degree:
        c[1:] = np.conj(a) ** (k - 1) * (q * q - 1)
    tail = 0.0 if q == 0 else (1 + q) * q**degree
    return c * f.rotation, tail


def series(f: AnalyticFunction, degree: int | None = None) -> tuple[np.ndarray, float | None]:
    """Coefficients and tail bound of ``f``; Mobius maps are expanded to ``degree``."""
    if isinstance(f, Constant):
        return np.array([f.value]), 0.0
    if isinstance(f, Polynomial):
        return np.asarray(f.coeffs), 0.0
    if isinstance(f, Taylor):
        return np.asarray(f.coeffs), f.tail_bound
    if isinstance(f, Mobius):
        return _mobius_series(f, DEFAULT_DEGREE if degree is None else degree)
    raise TypeError(f"not an analytic function: {f!r}")


def series_degree(f: AnalyticFunction) -> int:
    """Degree of the stored expansion (numerical bandwidth for Mobius maps)."""
    if isinstance(f, Constant):
        return 0
    if isinstance(f, (Polynomial, Taylor)):
        return len(f.coeffs) - 1
    q = abs(f.a)
    if q == 0:
        return 1
    return int(min(DEFAULT_DEGREE, math.ceil(37.0 / -math.log(q))))


def tail_bound(f: AnalyticFunction) -> float | None:
    if isinstance(f, Taylor):
        return f.tail_bound
    return 0.0


def closed_disk(f: AnalyticFunction) -> bool:
    """True when ``f`` extends continuously to the closed disk in this model."""
    return not (isinstance(f, Taylor) and f.tail_bound is None)


def is_constant(f: AnalyticFunction, atol: float = CONSTANT_ATOL) -> bool:
    if isinstance(f, Constant):
        return True
    if isinstance(f, Mobius):
        return False
    return bool(np.all(np.abs(f.coeffs[1:]) < atol))


def value_at_zero(f: AnalyticFunction) -> complex:
    if isinstance(f, Constant):
        return f.value
    if isinstance(f, Mobius):
        return f.rotation * f.a
    return complex(f.coeffs[0])


def _from_series(c: np.ndarray, tail: float | None, prefer_poly: bool) -> AnalyticFunction:
    if prefer_poly and tail == 0.0:
        c = _trim(c)
        if len(c) == 1:
            return Constant(c[0])
        return Polynomial(c)
    return Taylor(c, tail)


# ---------------------------------------------------------------------------
# evaluation

def _check_domain(f: AnalyticFunction, z: np.ndarray) -> None:
    m = float(np.max(np.abs(z))) if z.size else 0.0
    if m > 1 + _BOUNDARY_SLACK:
        raise ValueError(f"point outside the closed unit disk (|z| = {m!r})")
    if not closed_disk(f) and m >= 1:
        raise ValueError("Taylor series with unknown tail can only be evaluated for |z| < 1")


def _horner(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = np.full(z.shape, c[-1], dtype=complex)
    for ck in c[-2::-1]:
        out = out * z + ck
    return out


def _mobius_eval(f: Mobius, z: np.ndarray) -> np.ndarray:
    den = 1 - np.conj(f.a) * z
    if np.any(np.abs(den) < 1e-300):
        raise ZeroDivisionError("Mobius pole reached")
    return f.rotation * (f.a - z) / den


def evaluate(f: AnalyticFunction, z):
    """Value of ``f`` at ``z`` (scalar or array) with ``|z| <= 1``."""
    scalar = np.ndim(z) == 0
    zz = np.asarray(z, dtype=complex)
    _check_domain(f, zz)
    if isinstance(f, Constant):
        out = np.full(zz.shape, f.value, dtype=complex)
    elif isinstance(f, Mobius):
        out = _mobius_eval(f, zz)
    else:
        out = _horner(np.asarray(f.coeffs), zz)
    return complex(out) if scalar else out


def _radial_powers(c: np.ndarray, radii: np.ndarray) -> np.ndarray:
    k = np.arange(len(c))
    return c[None, :] * np.power(radii[:, None], k[None, :])


def evaluate_on_circles(f: AnalyticFunction, radii, n_angular: int) -> np.ndarray:
    """Values on the polar grid ``radii x {2 pi j / n_angular}``.

    Series are evaluated with one FFT per circle after folding the
    coefficients modulo ``n_angular``, which is exact for any degree.
    """
    radii = np.asarray(radii, dtype=float)
    m = int(n_angular)
    if radii.size and radii.max() > 1:
        raise ValueError("radius outside the closed unit disk")
    if not closed_disk(f) and radii.size and radii.max() >= 1:
        raise ValueError("Taylor series with unknown tail can only be evaluated for |z| < 1")
    if isinstance(f, Constant):
        return np.full((radii.size, m), f.value, dtype=complex)
    theta = 2 * np.pi * np.arange(m) / m
    if isinstance(f, Mobius):
        z = radii[:, None] * np.exp(1j * theta)[None, :]
        return _mobius_eval(f, z)
    a = _radial_powers(np.asarray(f.coeffs), radii)
    n = a.shape[1]
    blocks = -(-n // m)
    if blocks * m != n:
        a = np.concatenate([a, np.zeros((radii.size, blocks * m - n), dtype=complex)], axis=1)
    folded = a.reshape(radii.size, blocks, m).sum(axis=1)
    return m * np.fft.ifft(folded, axis=1)


def evaluate_polar(f: AnalyticFunction, radii, thetas) -> np.ndarray:
    """Values on the tensor grid ``radii x thetas`` for arbitrary angles."""
    radii = np.asarray(radii, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    if isinstance(f, Constant):
        return np.full((radii.size, thetas.size), f.value, dtype=complex)
    if isinstance(f, Mobius):
        return evaluate(f, radii[:, None] * np.exp(1j * thetas)[None, :])
    if radii.size and radii.max() > 1:
        raise ValueError("radius outside the closed unit disk")
    if not closed_disk(f) and radii.size and radii.max() >= 1:
        raise ValueError("Taylor series with unknown tail can only be evaluated for |z| < 1")
    c = np.asarray(f.coeffs)
    a = _radial_powers(c, radii)
    b = np.exp(1j * np.outer(np.arange(len(c)), thetas))
    return a @ b


# ---------------------------------------------------------------------------
# algebra

def _decay_ratio(c: np.ndarray) -> float | None:
    mags = np.abs(c)
    n = len(mags) - 1
    if n < 2:
        return None
    m = max(1, n // 4)
    hi, lo = mags[n - m + 1 :].max(), mags[n - 2 * m + 1 : n - m + 1].max()
    if lo == 0 or hi == 0:
        return None
    return float((hi / lo) ** (1.0 / m))


def derivative(f: AnalyticFunction, order: int = 1) -> AnalyticFunction:
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if order == 2:
        return derivative(derivative(f, 1), 1)
    if isinstance(f, Constant):
        return Constant(0)
    if isinstance(f, Mobius):
        n, q = DEFAULT_DEGREE, abs(f.a)
        j = np.arange(n + 1)
        c = f.rotation * (j + 1) * np.conj(f.a) ** j * (q * q - 1)
        if q == 0:
            tail = 0.0
        else:
            m = n + 1
            tail = (1 + q) * q**m * ((m + 1) - m * q) / (1 - q)
        return Taylor(c, tail)
    c = np.asarray(f.coeffs)
    d = c[1:] * np.arange(1, len(c)) if len(c) > 1 else np.zeros(1, dtype=complex)
    if isinstance(f, Polynomial):
        return _from_series(d, 0.0, prefer_poly=True)
    t = f.tail_bound
    if t is not None and t > 0:
        n = len(c) - 1
        q = _decay_ratio(c)
        t = None if q is None or q >= 1 else t * ((n + 1) - n * q) / (1 - q)
    return Taylor(d, t)


def scale(f: AnalyticFunction, k: complex, degree: int | None = None) -> AnalyticFunction:
    k = complex(k)
    if k == 1:
        return f
    if isinstance(f, Constant):
        return Constant(k * f.value)
    if k == 0:
        return Constant(0)
    if isinstance(f, Mobius):
        if abs(abs(k) - 1) <= ROTATION_ATOL:
            return Mobius(f.a, f.rotation * k / abs(k))
        c, t = series(f, degree)
        return Taylor(c * k, t * abs(k))
    if isinstance(f, Polynomial):
        return Polynomial(np.asarray(f.coeffs) * k)
    t = None if f.tail_bound is None else f.tail_bound * abs(k)
    return Taylor(np.asarray(f.coeffs) * k, t)


def _combine_tails(*tails):
    if any(t is None for t in tails):
        return None
    return float(sum(tails))


def add(f: AnalyticFunction, g: AnalyticFunction, degree: int | None = None) -> AnalyticFunction:
    if isinstance(f, Constant) and isinstance(g, Constant):
        return Constant(f.value + g.value)
    cf, tf = series(f, degree)
    cg, tg = series(g, degree)
    n = max(len(cf), len(cg))
    c = np.zeros(n, dtype=complex)
    c[: len(cf)] += cf
    c[: len(cg)] += cg
    exact = not isinstance(f, (Taylor, Mobius)) and not isinstance(g, (Taylor, Mobius))
    return _from_series(c, _combine_tails(tf, tg), prefer_poly=exact)


def multiply(f: AnalyticFunction, g: AnalyticFunction, degree: int | None = None) -> AnalyticFunction:
    """Cauchy product truncated at ``degree`` (default ``DEFAULT_DEGREE``)."""
    if isinstance(f, Constant):
        return scale(g, f.value, degree)
    if isinstance(g, Constant):
        return scale(f, g.value, degree)
    deg = DEFAULT_DEGREE if degree is None else int(degree)
    cf, tf = series(f, deg)
    cg, tg = series(g, deg)
    prod = np.convolve(cf, cg)
    dropped = float(np.abs(prod[deg + 1 :]).sum()) if len(prod) > deg + 1 else 0.0
    prod = prod[: deg + 1]
    if tf is None or tg is None:
        tail = None
    else:
        tail = dropped + float(np.abs(cf).sum()) * tg + float(np.abs(cg).sum()) * tf + tf * tg
    exact = isinstance(f, Polynomial) and isinstance(g, Polynomial)
    return _from_series(prod, tail, prefer_poly=exact)


def power(f: AnalyticFunction, n: int, degree: int | None = None) -> AnalyticFunction:
    if n < 0:
        raise ValueError("power must be nonnegative")
    if isinstance(f, Constant):
        return Constant(f.value**n)
    result: AnalyticFunction = Constant(1)
    base = f
    while n:
        if n & 1:
            result = multiply(result, base, degree)
        n >>= 1
        if n:
            base = multiply(base, base, degree)
    return result


def cesaro_symbol(psi: AnalyticFunction, n: int, degree: int | None = None) -> AnalyticFunction:
    """The symbol ``(1/n) sum_{m=1}^{n} psi^m`` of the n-th Cesaro mean of M_psi."""
    if n < 1:
        raise ValueError("n must be positive")
    if isinstance(psi, Constant):
        xi = psi.value
        if xi == 1:
            return Constant(1)
        return Constant(xi * (1 - xi**n) / (1 - xi) / n)
    term: AnalyticFunction = psi
    total: AnalyticFunction = psi
    for _ in range(n - 1):
        term = multiply(term, psi, degree)
        total = add(total, term, degree)
    return scale(total, 1.0 / n, degree)
