"""The acceptance suite run by ``ergodisk check``.

Each criterion returns a ``CriterionResult`` whose ``detail`` holds the
numbers it was judged on, so the report doubles as a record of the run.
"""

from __future__ import annotations

import math
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .classifier import classify
from .dynamics import cesaro_trace, full_trace
from .functions import (
    Constant,
    Mobius,
    Polynomial,
    cesaro_symbol,
    derivative,
    evaluate,
    multiply,
    scale,
    add,
)
from .norms import (
    Besov,
    Bloch,
    LittleBloch,
    besov1_seminorm,
    besov_seminorm,
    bloch_norm,
    carleson_window_sup,
    condition_31,
    growth_ratio,
    sup_norm_hinf,
)
from .quadrature import GridSpec, integrate_area

CASES = 50


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: dict

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number}: {self.name}"

    def to_dict(self) -> dict:
        return {"criterion": self.number, "name": self.name, "passed": self.passed, "detail": self.detail}


def _close(value: float, target: float, tol: float) -> bool:
    return abs(value - target) <= tol


def sigma_of_identity(samples: int = 200001) -> float:
    """``max_r (1/2)(1-r^2) log((1+r)/(1-r))`` by a dense grid and golden section."""
    def h(r):
        return 0.5 * (1 - r * r) * (np.log1p(r) - np.log1p(-r))

    r = np.linspace(0.0, 1.0, samples)[1:-1]
    k = int(np.argmax(h(r)))
    a, b = r[max(k - 1, 0)], r[min(k + 1, r.size - 1)]
    g = (math.sqrt(5) - 1) / 2
    for _ in range(100):
        c, d = b - g * (b - a), a + g * (b - a)
        if h(c) > h(d):
            b = d
        else:
            a = c
    return float(h(0.5 * (a + b)))


# ---------------------------------------------------------------------------

def criterion_quadrature(spec: GridSpec) -> CriterionResult:
    one = integrate_area(lambda z, w: np.ones_like(w), spec)
    log = integrate_area(lambda z, w: np.log(2 / w), spec)
    inv = integrate_area(lambda z, w: w**-0.5, spec)
    checks = {
        "area_one": (one.value, math.pi, 1e-8),
        "area_log": (log.value, math.pi * (1 + math.log(2)), 1e-6),
        "area_inverse_sqrt": (inv.value, 2 * math.pi, 1e-5),
    }
    return _compare(1, "quadrature oracle", checks)


def _compare(number: int, name: str, checks: dict) -> CriterionResult:
    detail = {}
    ok = True
    for key, (value, target, tol) in checks.items():
        passed = _close(value, target, tol)
        ok &= passed
        detail[key] = {"value": value, "target": target, "tol": tol, "passed": passed}
    return CriterionResult(number, name, ok, detail)


def criterion_besov(spec: GridSpec) -> CriterionResult:
    z = Polynomial([0, 1])
    c31 = condition_31(z, 2, spec).value
    checks = {
        "gamma_z_p2": (besov_seminorm(z, 2, spec).value, math.sqrt(math.pi), 1e-6),
        "gamma_z_p3": (besov_seminorm(z, 3, spec).value, (math.pi / 2) ** (1 / 3), 1e-5),
        "besov1_z2": (besov1_seminorm(Polynomial([0, 0, 1]), spec).value, 2 * math.pi, 1e-7),
        "condition_31_z": (c31, math.pi * (1 + math.log(2)), 1e-6),
        "condition_31_half_z": (condition_31(Polynomial([0, 0.5]), 2, spec).value, c31 / 4, 1e-6),
    }
    return _compare(2, "Besov norms", checks)


def criterion_constant_rotation(spec: GridSpec) -> CriterionResult:
    N = 10_000
    trace = cesaro_trace(Constant(1j), Constant(1), Bloch(), N, spec)
    ce = trace.column("cesaro_norm")
    n = np.arange(1, N + 1)
    bound = 4 / (n * math.sqrt(2))
    v1 = int(np.count_nonzero(ce > bound))
    v2 = int(np.count_nonzero(n * ce > 2 * math.sqrt(2)))
    return CriterionResult(
        3,
        "Cesaro bound for a unimodular constant",
        v1 == 0 and v2 == 0,
        {"N": N, "bound_violations": v1, "slack_violations": v2, "max_n_times_norm": float((n * ce).max())},
    )


def criterion_contraction(spec: GridSpec) -> CriterionResult:
    N = 200
    trace = full_trace(Polynomial([0, 0.5]), Constant(1), Bloch(), N, spec)
    it = trace.column("iterate_norm")
    sigma_half = 0.5 * sigma_of_identity()
    n = np.arange(1, N + 1)
    K = 1 + float((n * 0.5 ** (n - 1)).max()) * sigma_half
    last = float(trace.entries[-1].cesaro_norm.value)
    ok = float(it.max()) <= K + 1e-3 and last < 0.02
    return CriterionResult(
        4,
        "iterates of a strict contraction",
        ok,
        {"sup_iterate_norm": float(it.max()), "K": K, "cesaro_norm_200": last},
    )


def criterion_mean_ergodic_failure(spec: GridSpec) -> CriterionResult:
    trace = cesaro_trace(Polynomial([0, 1]), Constant(1), Bloch(), 1000, spec)
    ce = trace.column("cesaro_norm")[99:]
    m = float(ce.min())
    return CriterionResult(
        5,
        "Cesaro means of z do not vanish in the Bloch norm",
        m >= 0.3,
        {"min_cesaro_norm_100_1000": m, "argmin_n": int(np.argmin(ce)) + 100, "threshold": 0.3},
    )


H, F, U = "Holds", "Fails", "Undecided"
CF, CH = "ConditionalOn(power bounded)->Fails", "ConditionalOn(power bounded)->Holds"

EXPECTED_TABLE = {
    ("const 0.5", "bloch"): (H, H, H),
    ("const 0.5", "little-bloch"): (H, H, H),
    ("const 0.5", "besov(p=2.0)"): (H, H, H),
    ("const 0+1i", "bloch"): (H, H, H),
    ("const 0+1i", "little-bloch"): (H, H, H),
    ("const 0+1i", "besov(p=2.0)"): (H, H, H),
    ("const 2", "bloch"): (F, F, F),
    ("const 2", "little-bloch"): (F, F, F),
    ("const 2", "besov(p=2.0)"): (F, F, F),
    ("poly 0 1", "bloch"): (U, CF, F),
    ("poly 0 1", "little-bloch"): (U, CH, F),
    ("poly 0 1", "besov(p=2.0)"): (H, H, F),
    ("poly 0 0.5", "bloch"): (H, H, H),
    ("poly 0 0.5", "little-bloch"): (H, H, H),
    ("poly 0 0.5", "besov(p=2.0)"): (H, H, H),
    ("mobius 0.5", "bloch"): (U, CF, F),
    ("mobius 0.5", "little-bloch"): (U, CH, F),
    ("mobius 0.5", "besov(p=2.0)"): (H, H, F),
}


def criterion_classifier(spec: GridSpec) -> CriterionResult:
    from .parser import parse_spec

    cells = {}
    ok = True
    for (fn, label), expected in EXPECTED_TABLE.items():
        space = {"bloch": Bloch(), "little-bloch": LittleBloch()}.get(label) or Besov(2)
        rep = classify(parse_spec(fn), space, spec)
        got = tuple(v.label for v in rep.verdicts)
        passed = got == expected
        if (fn, label) == ("poly 0 1", "bloch"):
            passed &= rep.power_bounded.citation == "is still open"
        ok &= passed
        cells[f"{fn} | {label}"] = {"got": list(got), "passed": passed}
    return CriterionResult(6, "classifier matrix", ok, cells)


def _random_poly(rng: np.random.Generator, max_degree: int = 6, exact_degree: bool = False) -> Polynomial:
    d = max_degree if exact_degree else int(rng.integers(1, max_degree + 1))
    c = rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1)
    c[d] = c[d] if abs(c[d]) > 0.1 else 0.5
    return Polynomial(c)


def _random_function(rng: np.random.Generator):
    if rng.random() < 0.25:
        a = 0.8 * math.sqrt(rng.random()) * np.exp(2j * math.pi * rng.random())
        return Mobius(a, np.exp(2j * math.pi * rng.random()))
    return _random_poly(rng)


def _unit_l1(f):
    # coefficient l1 norm one keeps |f| <= 1 on the disk
    if isinstance(f, Polynomial):
        return scale(f, 1.0 / float(np.abs(f.coeffs).sum()))
    return f


def _random_points(rng: np.random.Generator, n: int, rmax: float = 0.95) -> np.ndarray:
    return rmax * np.sqrt(rng.random(n)) * np.exp(2j * math.pi * rng.random(n))


def criterion_properties(spec: GridSpec) -> CriterionResult:
    rng = np.random.default_rng(spec.seed)
    failures: dict[str, int] = {}

    def record(name, ok):
        failures.setdefault(name, 0)
        if not ok:
            failures[name] += 1

    for _ in range(CASES):
        psi = _random_poly(rng)
        s = sup_norm_hinf(psi, spec).value
        psi = scale(psi, rng.uniform(0.1, 1.0) / s)
        s = sup_norm_hinf(psi, spec)
        beta = bloch_norm(psi, spec)[1]
        record("schwarz_pick", beta.value <= s.value + 1e-6)

    for _ in range(CASES):
        f = _random_function(rng)
        d = derivative(f)
        z = _random_points(rng, 4, 0.9)
        h = 1e-5
        fd = (evaluate(f, z + h) - evaluate(f, z - h)) / (2 * h)
        exact = evaluate(d, z)
        rel = np.abs(fd - exact) / np.maximum(np.abs(exact), 1.0)
        record("derivative_fd", bool(rel.max() <= 1e-6))

    for _ in range(CASES):
        psi = _unit_l1(_random_function(rng))
        f = _unit_l1(_random_poly(rng, 3))
        n = int(rng.integers(1, 16))
        g = multiply(cesaro_symbol(psi, n, 512), f, 512)
        z = _random_points(rng, 5, 0.9)
        pz = evaluate(psi, z)
        direct = evaluate(f, z) * sum(pz**m for m in range(1, n + 1)) / n
        record("cesaro_identity", bool(np.abs(evaluate(g, z) - direct).max() <= 1e-10))

    for _ in range(CASES):
        f = _random_poly(rng, 4)
        g = _random_poly(rng, 4)
        c = complex(rng.normal(), rng.normal())
        nf, _ = bloch_norm(f, spec)
        ncf, _ = bloch_norm(scale(f, c), spec)
        budget = ncf.error_estimate + abs(c) * nf.error_estimate + 1e-9 * ncf.value
        record("homogeneity", abs(ncf.value - abs(c) * nf.value) <= budget)
        ng, _ = bloch_norm(g, spec)
        nfg, _ = bloch_norm(add(f, g), spec)
        budget = nfg.error_estimate + nf.error_estimate + ng.error_estimate + 1e-9 * nfg.value
        record("triangle", nfg.value <= nf.value + ng.value + budget)

    for _ in range(CASES):
        psi = _random_poly(rng, 4)
        p = float(rng.uniform(1.5, 3.0))
        r = float(rng.uniform(0.3, 2.0))
        omegas = list(_random_points(rng, 4, 0.97))
        win = carleson_window_sup(psi, p, r, omegas, spec)
        total = condition_31(psi, p, spec)
        record("window_below_total", win.value <= total.value + win.error_estimate + total.error_estimate)

    ok = all(v == 0 for v in failures.values())
    return CriterionResult(7, "property suites", ok, {"cases_per_suite": CASES, "failures": failures})


def criterion_growth(spec: GridSpec) -> CriterionResult:
    rng = np.random.default_rng(spec.seed + 8)
    violations = 0
    worst = -math.inf
    for _ in range(CASES):
        f = _random_poly(rng, 10, exact_degree=True)
        _, beta = bloch_norm(f, spec)
        z = _random_points(rng, 100, 0.999)
        r = np.abs(z)
        bound = abs(evaluate(f, 0)) + 0.5 * (beta.value + beta.error_estimate) * (np.log1p(r) - np.log1p(-r))
        gap = np.abs(evaluate(f, z)) - bound
        worst = max(worst, float(gap.max()))
        violations += int(np.count_nonzero(gap > 1e-12 * (1 + bound)))
    ratio = growth_ratio(Constant(1), Bloch(), spec).value
    literal_ok = _close(ratio, 1 / math.log(2), 1e-9)
    return CriterionResult(
        8,
        "growth bounds",
        violations == 0 and literal_ok,
        {
            "radial_bound_violations": violations,
            "worst_gap": worst,
            "literal_ratio_constant_one": ratio,
            "literal_ratio_target": 1 / math.log(2),
            "note": "the literal pointwise bound fails for f = 1 by the factor 1/log 2",
        },
    )


DETERMINISM_COMMANDS = (
    ["norms", "--space", "bloch", "--fn", "poly 0 1"],
    ["norms", "--space", "besov", "--p", "2", "--fn", "poly 0 0.5"],
    ["classify", "--space", "bloch", "--fn", "poly 0 1"],
    ["trace", "--space", "bloch", "--fn", "const 0+1i", "--n", "50", "--svg"],
    ["trace", "--space", "bloch", "--fn", "poly 0 0.5", "--n", "20", "--svg"],
    ["spectrum", "--space", "bloch", "--fn", "mobius 0.5", "--n", "200", "--svg"],
)


def _snapshot(directory: Path) -> dict[str, bytes]:
    return {str(p.relative_to(directory)): p.read_bytes() for p in sorted(directory.rglob("*")) if p.is_file()}


def criterion_determinism(spec: GridSpec, grid_file: str | None = None) -> CriterionResult:
    """Run every non-check command twice in separate directories and compare bytes."""
    from .cli import run_cli

    runs = []
    with tempfile.TemporaryDirectory() as tmp:
        for attempt in range(2):
            base = Path(tmp) / f"run{attempt}"
            for i, argv in enumerate(DETERMINISM_COMMANDS):
                extra = ["--grid", grid_file] if grid_file else []
                run_cli([*argv, *extra, "--out", str(base / str(i))], quiet=True)
            runs.append(_snapshot(base))
    same = runs[0] == runs[1] and len(runs[0]) > 0
    differing = sorted(k for k in set(runs[0]) | set(runs[1]) if runs[0].get(k) != runs[1].get(k))
    return CriterionResult(
        9,
        "determinism",
        same,
        {"files_compared": len(runs[0]), "differing": differing},
    )


CRITERIA: tuple[Callable[[GridSpec], CriterionResult], ...] = (
    criterion_quadrature,
    criterion_besov,
    criterion_constant_rotation,
    criterion_contraction,
    criterion_mean_ergodic_failure,
    criterion_classifier,
    criterion_properties,
    criterion_growth,
)


def run_all(spec: GridSpec | None = None, grid_file: str | None = None, echo=None) -> list[CriterionResult]:
    spec = spec or GridSpec()
    results = []
    for criterion in CRITERIA:
        res = criterion(spec)
        results.append(res)
        if echo:
            echo(res.line())
    res = criterion_determinism(spec, grid_file)
    results.append(res)
    if echo:
        echo(res.line())
    return results
