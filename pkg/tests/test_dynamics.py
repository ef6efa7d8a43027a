import math

import numpy as np
import pytest

from ergodisk.dynamics import (
    CSV_HEADER,
    Dictionary,
    IterateTrace,
    TraceEntry,
    apply_mult,
    bloch_opnorm_bounds,
    cesaro_trace,
    default_dictionary,
    full_trace,
    iterate_trace,
    opnorm_lower_probe,
)
from ergodisk.functions import Constant, Mobius, Polynomial, evaluate, scale
from ergodisk.norms import Besov, Bloch, bloch_norm, sup_norm_hinf
from ergodisk.quadrature import GridSpec, NormEstimate

SPEC = GridSpec()
Z = Polynomial([0, 1])
ONE = Constant(1)
SIGMA_Z = 0.44774320469430


def bloch_norm_of_power_oracle(n):
    """sup_r n r^(n-1) (1 - r^2), maximizer r^2 = (n-1)/(n+1)."""
    if n == 1:
        return 1.0
    r = math.sqrt((n - 1) / (n + 1))
    return n * r ** (n - 1) * (1 - r * r)


def test_apply_mult_examples():
    f = Mobius(0.3j)
    z = np.array([0.1, -0.4 + 0.2j])
    assert np.allclose(evaluate(apply_mult(ONE, f), z), evaluate(f, z), atol=1e-12)
    assert np.allclose(apply_mult(Z, Z).coeffs, [0, 0, 1])


def test_iterate_trace_constant_one_is_flat():
    f = Polynomial([1, 0.5])
    trace = iterate_trace(ONE, f, Bloch(), 10, SPEC)
    norm = bloch_norm(f, SPEC)[0].value
    assert np.all(trace.column("iterate_norm") == norm)
    ces = cesaro_trace(ONE, f, Bloch(), 10, SPEC).column("cesaro_norm")
    assert np.all(ces == norm)


def test_iterate_trace_half():
    trace = iterate_trace(Constant(0.5), ONE, Bloch(), 30, SPEC)
    assert np.allclose(trace.column("iterate_norm"), 0.5 ** np.arange(1, 31), rtol=0, atol=0)


def test_iterate_trace_of_z_matches_oracle():
    trace = iterate_trace(Z, ONE, Bloch(), 60, SPEC)
    oracle = np.array([bloch_norm_of_power_oracle(n) for n in range(1, 61)])
    assert np.allclose(trace.column("iterate_norm"), oracle, atol=1e-9)
    assert trace.entries[-1].iterate_norm.value == pytest.approx(2 / math.e, abs=0.01)
    assert all(e.iterate_norm.converged for e in trace.entries)


def test_cesaro_of_rotation():
    trace = cesaro_trace(Constant(1j), ONE, Bloch(), 10_000, SPEC)
    ce = trace.column("cesaro_norm")
    n = np.arange(1, 10_001)
    assert ce[3] == pytest.approx(0, abs=1e-15)
    assert np.all(ce <= 4 / (n * math.sqrt(2)))
    assert trace.reference_bound[0] == pytest.approx(4 / math.sqrt(2))


@pytest.mark.parametrize("xi", [-1, 1j, np.exp(0.1j), np.exp(2.5j)])
def test_unimodular_constants_have_bounded_n_times_cesaro(xi):
    trace = cesaro_trace(Constant(xi), ONE, Bloch(), 2000, SPEC)
    n = np.arange(1, 2001)
    assert np.all(n * trace.column("cesaro_norm") <= 4 / abs(1 - xi) + 1e-12)


def test_cesaro_trace_matches_symbol_definition():
    from ergodisk.functions import cesaro_symbol, multiply

    psi = Polynomial([0.1, 0.5, -0.2j])
    f = Polynomial([1, 0.3])
    trace = cesaro_trace(psi, f, Bloch(), 8, SPEC)
    for e in trace.entries:
        g = multiply(cesaro_symbol(psi, e.n), f)
        assert e.cesaro_norm.value == pytest.approx(bloch_norm(g, SPEC)[0].value, rel=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_contractions_decay(seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi = Polynomial(c)
    psi = scale(psi, 0.25 / sup_norm_hinf(psi, SPEC).value)
    trace = full_trace(psi, ONE, Bloch(), 200, SPEC)
    for name in ("iterate_norm", "cesaro_norm"):
        col = trace.column(name)
        assert col[-1] < col[0] / 100


def test_besov_trace_uses_besov_norm():
    trace = iterate_trace(Z, ONE, Besov(2), 3, SPEC)
    # gamma of z^n with p = 2 is sqrt(pi n)
    assert np.allclose(trace.column("iterate_norm"), np.sqrt(np.pi * np.arange(1, 4)), atol=1e-6)


def test_trace_determinism():
    a = full_trace(Mobius(0.5), ONE, Bloch(), 5, SPEC)
    b = full_trace(Mobius(0.5), ONE, Bloch(), 5, SPEC)
    assert a.to_csv() == b.to_csv()


def test_truncation_flags_entries():
    from ergodisk.functions import Taylor

    psi = Taylor(np.ones(4), 0.5)
    trace = iterate_trace(psi, ONE, Bloch(), 2, SPEC)
    assert not any(e.iterate_norm.converged for e in trace.entries)


def test_csv_format():
    trace = IterateTrace(Bloch(), "const 0.5", "const 1", ())
    assert trace.to_csv() == CSV_HEADER + "\n"
    trace = full_trace(Constant(1j), ONE, Bloch(), 8, SPEC)
    lines = trace.to_csv().splitlines()
    assert lines[0] == "n,iterate_norm,iterate_err,cesaro_norm,cesaro_err,reference_bound"
    assert len(lines) == 9
    row4 = lines[4].split(",")
    assert row4[0] == "4" and float(row4[3]) == pytest.approx(0, abs=1e-12)
    plain = full_trace(Z, ONE, Bloch(), 2, SPEC).to_csv().splitlines()
    assert plain[1].endswith(",")


def test_trace_entries_must_increase():
    e = TraceEntry(1, NormEstimate.exact(1.0))
    with pytest.raises(ValueError):
        IterateTrace(Bloch(), "", "", (e, e))


def test_opnorm_bounds_examples():
    lo, hi = bloch_opnorm_bounds(Constant(0.7j), SPEC)
    assert lo.value == pytest.approx(0.7, abs=1e-12) and hi.value == pytest.approx(0.7, abs=1e-12)
    lo, hi = bloch_opnorm_bounds(Z, SPEC)
    assert lo.value == pytest.approx(1, abs=1e-12)
    assert hi.value == pytest.approx(1 + SIGMA_Z, abs=1e-9)
    lo, hi = bloch_opnorm_bounds(Polynomial([0, 0.5]), SPEC)
    assert lo.value == pytest.approx(0.5, abs=1e-12)
    assert hi.value == pytest.approx(0.5 + SIGMA_Z / 2, abs=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_opnorm_sandwich_ordered(seed):
    rng = np.random.default_rng(100 + seed)
    psi = Polynomial(rng.normal(size=5) + 1j * rng.normal(size=5))
    lo, hi = bloch_opnorm_bounds(psi, SPEC)
    assert lo.value <= hi.value + lo.error_estimate + hi.error_estimate


def test_dictionary_requires_nonzero_norms():
    with pytest.raises(ValueError):
        Dictionary(Bloch(), ())
    with pytest.raises(ValueError):
        Dictionary.build([Constant(0)], Bloch(), SPEC)


def test_default_dictionary_is_normalized():
    d = default_dictionary(Bloch(), SPEC)
    assert len(d.members) == 5
    assert all(norm == pytest.approx(1, abs=1e-9) for _, norm in d.members)


def test_probe_constants():
    d = Dictionary.build([ONE, Z], Bloch(), SPEC)
    assert all(p.with_hinf == 1 for p in opnorm_lower_probe(ONE, Bloch(), 20, d, SPEC))
    probe = opnorm_lower_probe(Constant(2), Bloch(), 40, d, SPEC)
    assert all(p.with_hinf >= 2.0**p.n for p in probe)
    assert math.isinf(opnorm_lower_probe(Constant(2), Bloch(), 1100, d, SPEC)[-1].with_hinf)


@pytest.mark.slow
def test_probe_z_stays_bounded_on_small_dictionary():
    d = Dictionary.build([ONE, Z, Polynomial([0, 0, 1])], Bloch(), SPEC)
    probe = opnorm_lower_probe(Z, Bloch(), 500, d, SPEC)
    assert max(p.lower_bound for p in probe) <= 1.1
