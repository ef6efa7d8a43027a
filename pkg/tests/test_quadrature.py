import math

import numpy as np
import pytest

from ergodisk.functions import Mobius, evaluate
from ergodisk.quadrature import (
    GridSpec,
    NonFiniteValueError,
    NormEstimate,
    hyperbolic_distance,
    hyperbolic_window,
    integrate_area,
    integrate_hyperbolic_window,
    integrate_invariant,
    ladder_growing,
    sup_on_disk,
)

SPEC = GridSpec()


def ones(z, w):
    return np.ones_like(w)


def dense_radial_max(h, n=2_000_001):
    r = np.linspace(0, 1, n)[:-1]
    return float(h(r).max())


def test_gridspec_defaults_and_json_round_trip():
    spec = GridSpec()
    assert spec.n_radial == 200 and spec.n_angular == 256
    assert spec.radial_map == "boundary_clustered"
    assert spec.boundary_ladder[0] == 0.5 and len(spec.boundary_ladder) == 20
    assert spec.seed == 0xB10C
    assert GridSpec.from_json(spec.to_json()) == spec
    assert list(spec.to_dict()) == [
        "n_radial", "n_angular", "radial_map", "refinement_levels", "boundary_ladder", "seed"
    ]


@pytest.mark.parametrize(
    "kwargs",
    [{"n_radial": 4}, {"radial_map": "log"}, {"boundary_ladder": (0.5, 0.4)},
     {"boundary_ladder": (0.5, 1.0)}, {"refinement_levels": -1}],
)
def test_gridspec_validation(kwargs):
    with pytest.raises(ValueError):
        GridSpec(**kwargs)


def test_norm_estimate_invariants():
    with pytest.raises(ValueError):
        NormEstimate(-1.0)
    est = NormEstimate(1.0, 0.0, True, None, True)
    assert not est.converged
    assert NormEstimate(2.0, math.inf).to_dict()["error"] is None


def test_area_of_disk():
    assert integrate_area(ones, SPEC).value == pytest.approx(math.pi, abs=1e-8)


def test_log_weight_integral():
    est = integrate_area(lambda z, w: np.log(2 / w), SPEC)
    assert est.value == pytest.approx(math.pi * (1 + math.log(2)), abs=1e-6)
    assert est.converged


def test_inverse_sqrt_weight_integral():
    est = integrate_area(lambda z, w: w**-0.5, SPEC)
    assert est.value == pytest.approx(2 * math.pi, abs=1e-5)


def test_uniform_r_map_also_integrates_smooth_functions():
    spec = GridSpec(radial_map="uniform_r")
    est = integrate_area(lambda z, w: np.abs(z) ** 2, spec)
    assert est.value == pytest.approx(math.pi / 2, abs=1e-6)


def test_invariant_measure():
    assert integrate_invariant(lambda z, w: w**2, SPEC).value == pytest.approx(math.pi, abs=1e-9)
    assert integrate_invariant(lambda z, w: w**3, SPEC).value == pytest.approx(math.pi / 2, abs=1e-7)
    diverging = integrate_invariant(ones, SPEC)
    assert diverging.diverged and not diverging.converged


def test_invariant_is_area_of_reweighted_integrand():
    g = lambda z, w: np.abs(1 + z) ** 2 * w**2.5
    a = integrate_invariant(g, SPEC)
    b = integrate_area(lambda z, w: g(z, w) / w**2, SPEC)
    assert a.value == b.value


def test_linearity_and_monotonicity():
    g = lambda z, w: np.abs(z - 0.3) ** 2
    h = lambda z, w: np.log(2 / w)
    a, b = integrate_area(g, SPEC), integrate_area(h, SPEC)
    c = integrate_area(lambda z, w: 2.5 * g(z, w) + h(z, w), SPEC)
    budget = 2.5 * a.error_estimate + b.error_estimate + c.error_estimate + 1e-9
    assert abs(c.value - (2.5 * a.value + b.value)) <= budget
    assert integrate_area(lambda z, w: 0.5 * g(z, w), SPEC).value <= a.value


def test_non_finite_integrand_raises():
    with pytest.raises(NonFiniteValueError):
        integrate_area(lambda z, w: np.where(np.abs(z) < 0.5, np.nan, 1.0), SPEC)


def test_hyperbolic_distance_examples():
    assert hyperbolic_distance(0.3, 0.3) == 0
    assert hyperbolic_distance(0, 0.5) == pytest.approx(math.log(3), abs=1e-14)
    assert hyperbolic_distance(0.3, 0.7) == pytest.approx(hyperbolic_distance(0.7, 0.3), abs=1e-14)
    with pytest.raises(ValueError):
        hyperbolic_distance(1.0, 0)


def test_hyperbolic_distance_mobius_invariance():
    rng = np.random.default_rng(11)
    for _ in range(50):
        a = 0.9 * math.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        phi = Mobius(a, np.exp(2j * np.pi * rng.random()))
        z, w = 0.95 * np.sqrt(rng.random(2)) * np.exp(2j * np.pi * rng.random(2))
        lhs = hyperbolic_distance(evaluate(phi, z), evaluate(phi, w))
        assert lhs == pytest.approx(hyperbolic_distance(z, w), abs=1e-10)


def test_hyperbolic_window_geometry():
    c, rad = hyperbolic_window(0, math.log(3))
    assert c == 0 and rad == pytest.approx(0.5)
    c, rad = hyperbolic_window(0.6j, 1.0)
    # boundary points of the Euclidean disk are at hyperbolic distance r
    for t in np.linspace(0, 2 * np.pi, 7):
        assert hyperbolic_distance(c + rad * np.exp(1j * t), 0.6j) == pytest.approx(1.0, abs=1e-10)


def test_window_integrals():
    est = integrate_hyperbolic_window(ones, 0, math.log(3), SPEC)
    assert est.value == pytest.approx(math.pi / 4, abs=1e-4)
    assert integrate_hyperbolic_window(lambda z, w: np.zeros_like(w), 0.3, 1.0, SPEC).value == 0
    g = lambda z, w: np.log(2 / w)
    win = integrate_hyperbolic_window(g, 0.9, 2.0, SPEC)
    tot = integrate_area(g, SPEC)
    assert win.value <= tot.value + win.error_estimate + tot.error_estimate


def test_window_closed_form_for_log_weight():
    # with u = 1-|z|^2 this is pi * int_{3/4}^1 log(2/u) du
    exact = math.pi * (0.25 - 1.25 * math.log(2) + 0.75 * math.log(3))
    est = integrate_hyperbolic_window(lambda z, w: np.log(2 / w), 0, math.log(3), SPEC)
    assert est.value == pytest.approx(exact, abs=1e-9)


def test_sup_examples():
    est = sup_on_disk(lambda z, w: w, SPEC)
    assert est.value == 1 and est.witness == 0
    oracle = dense_radial_max(lambda r: (1 - r * r) * 2 * r)
    est = sup_on_disk(lambda z, w: w * 2 * np.abs(z), SPEC)
    assert est.value == pytest.approx(4 / (3 * math.sqrt(3)), abs=1e-6)
    assert est.value <= 4 / (3 * math.sqrt(3)) + 1e-15
    assert est.value >= oracle - 1e-12
    assert est.converged
    assert sup_on_disk(lambda z, w: np.full_like(w, 2.5), SPEC).value == 2.5


def test_sup_refinement_is_monotone():
    g = lambda z, w: w * np.abs(1 + z) ** 3
    values = [sup_on_disk(g, GridSpec(refinement_levels=k)).value for k in range(4)]
    assert values == sorted(values)


def test_sup_is_deterministic():
    g = lambda z, w: w * np.abs(np.sin(3 * z))
    assert sup_on_disk(g, SPEC) == sup_on_disk(g, SPEC)


def test_ladder_growing():
    assert ladder_growing(np.arange(1, 10, dtype=float))
    assert not ladder_growing(np.ones(10))
    assert not ladder_growing(np.arange(1, 4, dtype=float))
