import numpy as np
import pytest

from ergodisk.functions import Constant, Mobius, Polynomial, Taylor, evaluate
from ergodisk.parser import SpecSyntaxError, format_complex, load_taylor_csv, parse_spec, render


def test_parse_constant_forms():
    assert parse_spec("const 0.5") == Constant(0.5)
    assert parse_spec("const 0+1i") == Constant(1j)
    assert parse_spec("const -2.5e-3-4i") == Constant(-2.5e-3 - 4j)
    assert parse_spec("const 3i") == Constant(3j)


def test_parse_polynomial():
    f = parse_spec("poly 0 1 0.5-0.5i")
    assert isinstance(f, Polynomial)
    assert np.allclose(f.coeffs, [0, 1, 0.5 - 0.5j])


def test_parse_mobius_with_rotation():
    f = parse_spec("mobius 0.5 rot 0+1i")
    assert f == Mobius(0.5, 1j)


def test_parse_scale_nested():
    f = parse_spec("scale 2 (scale 0.5 (poly 0 1))")
    assert np.allclose(f.coeffs, [0, 1])


def test_taylor_csv(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("k,re,im\n0,1,0\n2,0.5,-1\n")
    f = parse_spec("taylor c.csv", base_dir=tmp_path)
    assert isinstance(f, Taylor)
    assert f.tail_bound is None
    assert np.allclose(f.coeffs, [1, 0, 0.5 - 1j])


def test_taylor_csv_rejects_unsorted(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("1,1,0\n0,1,0\n")
    with pytest.raises(ValueError):
        load_taylor_csv(p)


@pytest.mark.parametrize(
    "text, offset",
    [
        ("", 0),
        ("cosh 1", 0),
        ("poly 0 1x", 7),
        ("mobius 1.5", 7),
        ("mobius 0.5 rot 2", 15),
        ("scale 2 poly 0 1", 8),
        ("const 1 2", 8),
        ("const", 5),
    ],
)
def test_syntax_errors_report_offset(text, offset):
    with pytest.raises(SpecSyntaxError) as info:
        parse_spec(text)
    assert info.value.offset == offset


def test_offset_is_in_bytes():
    with pytest.raises(SpecSyntaxError) as info:
        parse_spec("poly 0 é")
    assert info.value.offset == 7
    with pytest.raises(SpecSyntaxError) as info:
        parse_spec("poly é 1 x")
    assert info.value.offset == 5


def test_non_finite_literal_rejected():
    with pytest.raises(SpecSyntaxError):
        parse_spec("const 1e999")


@pytest.mark.parametrize(
    "text",
    ["const 0.5", "const -1-2i", "poly 0 1 0.25+3i", "mobius 0.3-0.1i rot 0+1i", "mobius 0.5"],
)
def test_render_round_trip(text):
    f = parse_spec(text)
    g = parse_spec(render(f))
    z = np.array([0, 0.3 + 0.2j, -0.7])
    assert np.allclose(evaluate(f, z), evaluate(g, z), rtol=0, atol=0)


def test_format_complex_round_trips_exactly():
    for c in [0.1, 1 / 3 - 2j / 7, -0.0 + 1e-300j]:
        assert parse_spec("const " + format_complex(c)).value == c
