import cmath
import math

import numpy as np
from hypothesis import given, settings, strategies as st

from ergodisk.functions import (
    Constant,
    Mobius,
    Polynomial,
    add,
    cesaro_symbol,
    derivative,
    evaluate,
    multiply,
    scale,
)
from ergodisk.norms import bloch_norm, carleson_window_sup, condition_31, sup_norm_hinf
from ergodisk.parser import parse_spec, render
from ergodisk.quadrature import GridSpec, hyperbolic_distance

SPEC = GridSpec()
PROPS = settings(max_examples=50, derandomize=True, deadline=None)

reals = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
complexes = st.builds(complex, reals, reals)
coeff_lists = st.lists(complexes, min_size=2, max_size=6).filter(lambda c: max(abs(x) for x in c[1:]) > 1e-3)


@st.composite
def disk_points(draw, rmax=0.9):
    r = draw(st.floats(0, rmax))
    t = draw(st.floats(0, 2 * math.pi))
    return r * cmath.exp(1j * t)


@st.composite
def mobius_maps(draw):
    return Mobius(draw(disk_points(0.9)), cmath.exp(1j * draw(st.floats(0, 2 * math.pi))))


functions = st.one_of(st.builds(Polynomial, coeff_lists), mobius_maps())


def unit_l1(f):
    c = np.asarray(f.coeffs)
    return Polynomial(c / np.abs(c).sum())


@PROPS
@given(coeff_lists, st.floats(0.1, 1.0))
def test_schwarz_pick(coeffs, target):
    psi = Polynomial(coeffs)
    psi = scale(psi, target / sup_norm_hinf(psi, SPEC).value)
    s = sup_norm_hinf(psi, SPEC)
    _, beta = bloch_norm(psi, SPEC)
    assert beta.value <= s.value + 1e-6


@PROPS
@given(functions, st.lists(disk_points(), min_size=1, max_size=4))
def test_derivative_matches_central_differences(f, pts):
    z = np.array(pts)
    h = 1e-5
    fd = (evaluate(f, z + h) - evaluate(f, z - h)) / (2 * h)
    exact = evaluate(derivative(f), z)
    assert np.all(np.abs(fd - exact) <= 1e-6 * np.maximum(np.abs(exact), 1.0))


@PROPS
@given(coeff_lists, coeff_lists, st.integers(1, 15), st.lists(disk_points(), min_size=1, max_size=5))
def test_cesaro_identity_pointwise(pc, fc, n, pts):
    psi, f = unit_l1(Polynomial(pc)), unit_l1(Polynomial(fc))
    z = np.array(pts)
    g = multiply(cesaro_symbol(psi, n), f)
    pz = evaluate(psi, z)
    direct = evaluate(f, z) * sum(pz**m for m in range(1, n + 1)) / n
    assert np.abs(evaluate(g, z) - direct).max() <= 1e-10


@PROPS
@given(st.lists(complexes, min_size=1, max_size=5), complexes)
def test_bloch_homogeneity(coeffs, c):
    f = Polynomial(coeffs)
    a, _ = bloch_norm(f, SPEC)
    b, _ = bloch_norm(scale(f, c), SPEC)
    budget = b.error_estimate + abs(c) * a.error_estimate + 1e-9 * max(b.value, 1e-300)
    assert abs(b.value - abs(c) * a.value) <= budget


@PROPS
@given(st.lists(complexes, min_size=1, max_size=5), st.lists(complexes, min_size=1, max_size=5))
def test_bloch_triangle_inequality(fc, gc):
    f, g = Polynomial(fc), Polynomial(gc)
    nf, _ = bloch_norm(f, SPEC)
    ng, _ = bloch_norm(g, SPEC)
    nfg, _ = bloch_norm(add(f, g), SPEC)
    budget = nfg.error_estimate + nf.error_estimate + ng.error_estimate + 1e-9 * nfg.value
    assert nfg.value <= nf.value + ng.value + budget


@PROPS
@given(coeff_lists, st.floats(1.5, 3.0), st.floats(0.3, 2.0), st.lists(disk_points(0.97), min_size=1, max_size=3))
def test_window_below_total(coeffs, p, r, omegas):
    psi = Polynomial(coeffs)
    win = carleson_window_sup(psi, p, r, omegas, SPEC)
    total = condition_31(psi, p, SPEC)
    assert win.value <= total.value + win.error_estimate + total.error_estimate


@PROPS
@given(mobius_maps(), disk_points(0.95), disk_points(0.95))
def test_hyperbolic_distance_mobius_invariant(phi, z, w):
    lhs = hyperbolic_distance(evaluate(phi, z), evaluate(phi, w))
    assert math.isclose(lhs, hyperbolic_distance(z, w), abs_tol=1e-9)


@PROPS
@given(st.one_of(st.builds(Constant, complexes), st.builds(Polynomial, coeff_lists), mobius_maps()))
def test_parser_round_trip(f):
    g = parse_spec(render(f))
    z = np.array([0, 0.3 - 0.4j, -0.8])
    assert np.allclose(evaluate(g, z), evaluate(f, z), rtol=1e-14, atol=1e-14)
