"""Verdicts on power boundedness and (uniform) mean ergodicity of M_psi.

Each verdict is read off from known theorems once the relevant quantities
(sup norm, range closure, log-Carleson integral) have been estimated. Inside
the numerical band around ``||psi||_inf = 1`` the classifier refuses to
decide, and conclusions that rest on power boundedness are returned as
``ConditionalOn`` verdicts instead of being promoted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .functions import (
    AnalyticFunction,
    closed_disk,
    derivative,
    evaluate,
    is_constant,
    value_at_zero,
)
from .norms import (
    Besov,
    Bloch,
    LittleBloch,
    ModulusField,
    SpaceTag,
    _unit,
    bloch_norm,
    condition_31,
    necessary_multiplier_sup,
    resolved_ladder,
    sigma_psi,
    sup_norm_hinf,
)
from .parser import render
from .quadrature import GridSpec, NormEstimate, maximize

DEFAULT_TOL = 1e-9
PREMISE = "power bounded"

# citation tags
C_PROP21 = "Prop 2.1"
C_THM22_23 = "Theorems 2.2, 2.3"
C_THM24 = "Theorem 2.4 (Dunford-Lin)"
C_PROP25 = "Prop 2.5"
C_PROP26 = "Prop 2.6"
C_THM28 = "Theorem 2.8"
C_OPEN = "is still open"
C_THM31 = "Theorem 3.1"
C_THM32 = "Theorem 3.2"
C_THM34 = "Theorem 3.4"
C_PROP14 = "Prop 1.4(II)"
C_NECESSARY = "necessary multiplier condition"
C_GAP = "gap between the sufficient and necessary multiplier conditions"
C_UNBOUNDED = "M_psi not shown bounded"
C_BAND = "unit band"


class Status(Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    UNDECIDED = "Undecided"
    CONDITIONAL = "ConditionalOn"


Evidence = tuple[tuple[str, NormEstimate], ...]


@dataclass(frozen=True)
class Verdict:
    """A theorem-backed conclusion.

    For ``ConditionalOn`` verdicts ``premise`` names the unproven hypothesis
    and ``consequent`` what the cited result gives once it is granted.
    """

    status: Status
    citation: str
    evidence: Evidence = ()
    premise: str | None = None
    consequent: Status | None = None

    def __post_init__(self):
        if self.status in (Status.HOLDS, Status.FAILS) and not self.citation:
            raise ValueError("Holds/Fails verdicts need a citation")
        if self.status is Status.CONDITIONAL:
            if not self.premise:
                raise ValueError("ConditionalOn verdicts need a premise")
            if self.consequent is None or self.consequent is Status.CONDITIONAL:
                raise ValueError("ConditionalOn verdicts resolve to Holds, Fails or Undecided")
        object.__setattr__(self, "evidence", tuple(self.evidence))

    @property
    def label(self) -> str:
        if self.status is Status.CONDITIONAL:
            return f"ConditionalOn({self.premise})->{self.consequent.value}"
        return self.status.value

    def to_dict(self) -> dict:
        return {
            "status": self.label,
            "citation": self.citation,
            "evidence": [{"name": name, **est.to_dict()} for name, est in self.evidence],
        }


def holds(citation, evidence=()):
    return Verdict(Status.HOLDS, citation, evidence)


def fails(citation, evidence=()):
    return Verdict(Status.FAILS, citation, evidence)


def undecided(citation, evidence=()):
    return Verdict(Status.UNDECIDED, citation, evidence)


def conditional(consequent: Status, citation, evidence=()):
    return Verdict(Status.CONDITIONAL, citation, evidence, PREMISE, consequent)


@dataclass(frozen=True)
class ClassificationReport:
    space: SpaceTag
    psi_id: str
    power_bounded: Verdict
    mean_ergodic: Verdict
    uniformly_mean_ergodic: Verdict
    preconditions: Evidence = ()
    tolerances: dict = field(default_factory=lambda: {"unit_band": DEFAULT_TOL})

    def __post_init__(self):
        object.__setattr__(self, "preconditions", tuple(self.preconditions))
        if self.uniformly_mean_ergodic.status is Status.HOLDS and self.mean_ergodic.status not in (
            Status.HOLDS,
            Status.CONDITIONAL,
        ):
            raise ValueError("uniform mean ergodicity implies mean ergodicity")

    @property
    def verdicts(self) -> tuple[Verdict, Verdict, Verdict]:
        return self.power_bounded, self.mean_ergodic, self.uniformly_mean_ergodic

    @property
    def diverged(self) -> bool:
        return any(est.diverged for _, est in self.preconditions)

    def to_dict(self) -> dict:
        return {
            "space": self.space.label,
            "psi": self.psi_id,
            "power_bounded": self.power_bounded.to_dict(),
            "mean_ergodic": self.mean_ergodic.to_dict(),
            "uniformly_mean_ergodic": self.uniformly_mean_ergodic.to_dict(),
            "preconditions": [{"name": n, **est.to_dict()} for n, est in self.preconditions],
            "tolerances": self.tolerances,
        }


# ---------------------------------------------------------------------------
# range closure

@dataclass(frozen=True)
class ClosureTest:
    """Whether 1 lies in the closure of psi(U); ``result`` is None when undecided."""

    result: bool | None
    distance: NormEstimate


def _newton_to_one(psi: AnalyticFunction, z0: complex, limit: float, steps: int = 30) -> complex | None:
    d = derivative(psi)
    z = complex(z0)
    for _ in range(steps):
        fz = evaluate(psi, z) - 1
        dz = evaluate(d, z)
        if dz == 0 or not math.isfinite(abs(dz)):
            return None
        z = z - fz / dz
        if abs(z) > limit:
            z = z / abs(z) * limit
        if not math.isfinite(abs(z)):
            return None
    return z


def one_in_closure(psi: AnalyticFunction, tol: float = DEFAULT_TOL, spec: GridSpec | None = None) -> ClosureTest:
    """Estimate ``m = inf |1 - psi|`` over the disk: ``m < tol`` gives True,
    ``m > 10 tol`` gives False, anything between is undecided."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    spec = spec or GridSpec()
    if is_constant(psi):
        m = abs(1 - value_at_zero(psi))
        est = NormEstimate.exact(m, 0j)
    else:
        closed = closed_disk(psi)
        res = maximize(ModulusField(psi, _unit, offset=1), spec, closed=closed, sign=-1.0)
        m, witness = -res.value, res.witness
        limit = 1.0 if closed else float(resolved_ladder(psi, spec)[-1])
        z = _newton_to_one(psi, witness, limit)
        if z is not None:
            mz = abs(1 - evaluate(psi, z))
            if mz < m:
                m, witness = mz, z
        est = NormEstimate(m, res.last_gain, res.last_gain <= 1e-9 * max(m, tol), witness)
    if m < tol:
        return ClosureTest(True, est)
    if m > 10 * tol:
        return ClosureTest(False, est)
    return ClosureTest(None, est)


def _sunflower(n: int) -> np.ndarray:
    k = np.arange(n)
    golden = math.pi * (3 - math.sqrt(5))
    return np.sqrt((k + 0.5) / n) * np.exp(1j * golden * k)


def range_cloud(psi: AnalyticFunction, n_samples: int, spec: GridSpec | None = None) -> np.ndarray:
    """Values of psi on a deterministic interior point set plus the outermost
    trusted ladder circle.

    Under the log-Carleson condition on Besov spaces the closure of the range
    is the spectrum of M_psi; on the Bloch spaces it is a subset of it.
    """
    if int(n_samples) != n_samples or n_samples < 1:
        raise ValueError("n_samples must be a positive integer")
    spec = spec or GridSpec()
    rho = float(resolved_ladder(psi, spec)[-1])
    pts = np.concatenate([_sunflower(int(n_samples)) * rho,
                          rho * np.exp(2j * np.pi * np.arange(spec.n_angular) / spec.n_angular)])
    return np.asarray(evaluate(psi, pts), dtype=complex)


def besov_multiplier_check(psi: AnalyticFunction, p: float, spec: GridSpec | None = None) -> Verdict:
    """Holds when the log-Carleson integral is finite (sufficient), Fails when a
    necessary condition visibly breaks, Undecided in between."""
    spec = spec or GridSpec()
    p = Besov(p).p
    c31 = condition_31(psi, p, spec)
    if c31.converged and not c31.diverged:
        return holds(C_PROP14, [("condition_31", c31)])
    s = sup_norm_hinf(psi, spec)
    if s.diverged:
        return fails(C_NECESSARY, [("condition_31", c31), ("sup_norm_hinf", s)])
    nec = necessary_multiplier_sup(psi, p, spec)
    ev = [("condition_31", c31), ("sup_norm_hinf", s), ("necessary_sup", nec)]
    if nec.diverged:
        return fails(C_NECESSARY, ev)
    return undecided(C_GAP, ev)


# ---------------------------------------------------------------------------
# decision trees

def _check_tol(tol: float) -> float:
    tol = float(tol)
    if not tol > 0:
        raise ValueError("tol must be positive")
    return tol


def _tolerances(tol: float, spec: GridSpec) -> dict:
    return {"unit_band": tol, "grid": spec.to_dict()}


def _all(v: Verdict) -> tuple[Verdict, Verdict, Verdict]:
    return v, v, v


def _bloch_tree(psi, spec: GridSpec, tol: float, little: bool):
    s = sup_norm_hinf(psi, spec)
    b = bloch_norm(psi, spec)[0]
    sig = sigma_psi(psi, spec)
    upper = NormEstimate(
        max(b.value, s.value + sig.value),
        b.error_estimate + s.error_estimate + sig.error_estimate,
        b.converged and s.converged and sig.converged,
        None,
        b.diverged or s.diverged or sig.diverged,
    )
    ev = [("sup_norm_hinf", s), ("bloch_norm", b), ("sigma_psi", sig)]
    pre = [("bloch_opnorm_upper", upper)]
    constant = is_constant(psi)

    if s.diverged or b.diverged or sig.diverged:
        return _all(undecided(C_UNBOUNDED, ev)), pre
    if s.value > 1 + tol:
        return _all(fails(C_PROP21, ev)), pre
    if s.value + s.error_estimate < 1 - tol:
        return _all(holds(C_THM28, ev)), pre
    if s.value < 1 - tol:
        # the estimate sits below the band but its error reaches into it
        return _all(undecided(C_BAND, ev)), pre
    if constant:
        return _all(holds(C_THM22_23, ev)), pre

    closure = one_in_closure(psi, tol, spec)
    ev = ev + [("inf_abs_1_minus_psi", closure.distance)]
    if closure.result is None or not s.converged:
        return _all(undecided(C_BAND, ev)), pre
    pb = undecided(C_OPEN, ev)
    if closure.result:
        ume = fails(C_THM24, ev)
    else:
        ume = conditional(Status.HOLDS, C_PROP25 if little else C_PROP26, ev)
    if little:
        me = conditional(Status.HOLDS, C_PROP25, ev)
    else:
        me = conditional(Status.FAILS if closure.result else Status.HOLDS, C_PROP26, ev)
    return (pb, me, ume), pre


def classify_bloch(psi: AnalyticFunction, spec: GridSpec | None = None, tol: float = DEFAULT_TOL) -> ClassificationReport:
    spec = spec or GridSpec()
    tol = _check_tol(tol)
    (pb, me, ume), pre = _bloch_tree(psi, spec, tol, little=False)
    return ClassificationReport(Bloch(), render(psi), pb, me, ume, pre, _tolerances(tol, spec))


def classify_little_bloch(
    psi: AnalyticFunction, spec: GridSpec | None = None, tol: float = DEFAULT_TOL
) -> ClassificationReport:
    spec = spec or GridSpec()
    tol = _check_tol(tol)
    (pb, me, ume), pre = _bloch_tree(psi, spec, tol, little=True)
    return ClassificationReport(LittleBloch(), render(psi), pb, me, ume, pre, _tolerances(tol, spec))


def classify_besov(
    psi: AnalyticFunction, p: float, spec: GridSpec | None = None, tol: float = DEFAULT_TOL
) -> ClassificationReport:
    spec = spec or GridSpec()
    tol = _check_tol(tol)
    space = Besov(p)
    s = sup_norm_hinf(psi, spec)
    sig = sigma_psi(psi, spec)
    c31 = condition_31(psi, space.p, spec)
    ev = [("sup_norm_hinf", s), ("sigma_psi", sig), ("condition_31", c31)]
    pre = [("condition_31", c31)]

    def report(pb, me, ume):
        return ClassificationReport(space, render(psi), pb, me, ume, pre, _tolerances(tol, spec))

    if s.value > 1 + tol:
        return report(*_all(fails(C_THM31, ev)))
    if c31.diverged or not c31.converged:
        return report(*_all(undecided("condition_31 not finite", ev)))
    if s.diverged or s.value + s.error_estimate > 1 + tol:
        return report(*_all(undecided(C_BAND, ev)))

    pb = holds(C_THM32, ev)
    if is_constant(psi) and abs(abs(value_at_zero(psi)) - 1) <= tol:
        return report(pb, pb, holds(C_THM34, ev))
    closure = one_in_closure(psi, tol, spec)
    ev = ev + [("inf_abs_1_minus_psi", closure.distance)]
    if closure.result is None:
        ume = undecided(C_THM34, ev)
    elif closure.result:
        ume = fails(C_THM34, ev)
    else:
        ume = holds(C_THM34, ev)
    return report(pb, holds(C_THM32, ev), ume)


def classify(psi: AnalyticFunction, space: SpaceTag, spec: GridSpec | None = None, tol: float = DEFAULT_TOL):
    if isinstance(space, Bloch):
        return classify_bloch(psi, spec, tol)
    if isinstance(space, LittleBloch):
        return classify_little_bloch(psi, spec, tol)
    if isinstance(space, Besov):
        return classify_besov(psi, space.p, spec, tol)
    raise ValueError(f"no classification theory for {space.label}")
