import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from casipol.materials import (
    GRAPHITE_ENERGIES,
    AxisTable,
    ConstantResponse,
    Extrapolation,
    LorentzDrude,
    NO_EXTRAPOLATION,
    OpticalTableError,
    TabulatedResponse,
    build_permittivity,
    bundled_graphite_tables,
    graphite_like,
    kramers_kronig,
    load_optical_table,
    load_optical_tables,
)

WP, W0, GAMMA = 3.0, 2.0, 0.7


def lorentz_image(xi):
    return 1 + WP**2 / (W0**2 + GAMMA * xi + xi * xi)


def drude_image(xi):
    return 1 + WP**2 / (xi * (xi + GAMMA))


def test_closed_forms_against_quadrature():
    # the images used as oracles below, checked once by direct quadrature
    lor = LorentzDrude(oscillators=((WP, W0, GAMMA),))
    dru = LorentzDrude(drude=(WP, GAMMA))
    for xi in (0.05, 0.3, 2.0, 9.0, 40.0):
        for model, image in ((lor, lorentz_image), (dru, drude_image)):
            val = 1 + 2 / math.pi * quad(lambda w: w * model.eps_imag(w) / (w * w + xi * xi), 0, math.inf,
                                         limit=800, epsrel=1e-12)[0]
            assert val == pytest.approx(image(xi), rel=1e-9)
            assert model(xi) == pytest.approx(image(xi), rel=1e-14)


# -- loading -----------------------------------------------------------------

GOOD = b"# energy n k\n0.5, 1.2, 0.1\n1.0 1.3 0.2\n\n2.0,\t1.1, 0\n"


def test_load_happy_path():
    t = load_optical_table(io.BytesIO(GOOD), "x")
    assert len(t) == 3
    np.testing.assert_array_equal(t.energy, [0.5, 1.0, 2.0])
    assert t.axis == "x" and len(t.digest) == 64


def test_negative_k_names_the_row():
    bad = b"0.5 1.2 0.1\n1.0 1.3 -0.2\n2.0 1.1 0\n"
    with pytest.raises(OpticalTableError, match="line 2.*extinction"):
        load_optical_table(io.BytesIO(bad))


def test_unsorted_is_non_monotone():
    bad = b"0.5 1.2 0.1\n0.4 1.3 0.2\n2.0 1.1 0\n"
    with pytest.raises(OpticalTableError, match="non-monotone grid"):
        load_optical_table(io.BytesIO(bad))
    t = load_optical_table(io.BytesIO(bad), sort=True)
    np.testing.assert_array_equal(t.energy, [0.4, 0.5, 2.0])


@pytest.mark.parametrize("text,msg", [
    (b"0.5 1.2 0.1\n0.5 1.3 0.2\n", "duplicate"),
    (b"0.5 1.2\n1.0 1.3 0.2\n", "line 1.*3 columns"),
    (b"0.5 1.2 0.1\n1.0 abc 0.2\n", "line 2.*non-numeric"),
    (b"0.5 1.2 0.1\n", "at least 2"),
    (b"0.5 -1.2 0.1\n1.0 1.3 0.2\n", "line 1.*refractive"),
])
def test_malformed(text, msg):
    with pytest.raises(OpticalTableError, match=msg):
        load_optical_table(io.BytesIO(text))


def test_missing_axis(tmp_path):
    p = tmp_path / "mat_x.csv"
    p.write_bytes(GOOD)
    assert load_optical_table(p).axis == "x"
    with pytest.raises(OpticalTableError, match="missing axis: z"):
        load_optical_tables([p])


def test_bundled_tables_match_generator():
    t = bundled_graphite_tables()
    gx, gz = graphite_like()
    for table, model in ((t.x, gx), (t.z, gz)):
        ref = model.to_table(GRAPHITE_ENERGIES)
        np.testing.assert_allclose(table.n, ref.n, rtol=1e-11)
        np.testing.assert_allclose(table.k, ref.k, rtol=1e-11)


# -- Kramers-Kronig ----------------------------------------------------------

def test_transparent_medium():
    t = AxisTable(np.array([0.1, 1.0, 10.0]), np.array([1.5, 1.5, 1.5]), np.zeros(3))
    np.testing.assert_array_equal(kramers_kronig(t, np.array([0.0, 0.1, 3.0, 1e3]), NO_EXTRAPOLATION), 1.0)


def test_negative_xi_rejected():
    t = AxisTable(np.array([0.1, 1.0]), np.array([1.5, 1.5]), np.array([0.1, 0.1]))
    with pytest.raises(ValueError):
        kramers_kronig(t, -1.0)


def _synthetic(model, center):
    return model.to_table(np.geomspace(center / 100, center * 100, 801))


@pytest.mark.parametrize("kind", ["lorentz", "drude"])
def test_round_trip(kind):
    if kind == "lorentz":
        table, image, ext = _synthetic(LorentzDrude(oscillators=((WP, W0, GAMMA),)), W0), lorentz_image, Extrapolation("constant", low_cutoff=0.0)
        center = W0
    else:
        table, image, ext = _synthetic(LorentzDrude(drude=(WP, GAMMA)), GAMMA), drude_image, Extrapolation("drude")
        center = GAMMA
    xi = np.geomspace(center / 10, center * 10, 41)
    np.testing.assert_allclose(kramers_kronig(table, xi, ext), image(xi), rtol=1e-3)


def test_resolution_invariance():
    t = bundled_graphite_tables().x
    xi = np.geomspace(1e-3, 1e3, 25)
    a = kramers_kronig(t, xi, resolution=1.0)
    b = kramers_kronig(t, xi, resolution=2.0)
    np.testing.assert_allclose(a, b, rtol=1e-4)


def test_drude_tail_diverges_at_zero():
    t = bundled_graphite_tables()
    assert math.isinf(kramers_kronig(t.x, 0.0))
    assert math.isfinite(kramers_kronig(t.z, 0.0))


# -- models -------------------------------------------------------------------

def test_constant_model():
    m = build_permittivity(2.0, 2.0)
    ex, ez = m(np.array([0.0, 1.0, 1e6]))
    np.testing.assert_array_equal(ex, 2.0)
    np.testing.assert_array_equal(ez, 2.0)
    assert m.provenance == {"x": "constant", "z": "constant"}


def test_inconsistent_axis_coverage():
    with pytest.raises(ValueError, match="inconsistent axis coverage"):
        build_permittivity(x=2.0)


def test_cached_model_matches_direct_kk():
    model = LorentzDrude(oscillators=((WP, W0, GAMMA),))
    table = _synthetic(model, W0)
    ext = Extrapolation("constant", low_cutoff=0.0)
    cached = TabulatedResponse(table, ext)
    xi = np.geomspace(1e-3, 5e3, 97)
    np.testing.assert_allclose(cached(xi), kramers_kronig(table, xi, ext, rel_tol=1e-10), rtol=1e-6)


def test_far_above_table_tends_to_one(graphite):
    ex, ez = graphite(np.array([1e5, 1e6]))
    assert np.all(np.abs(ex - 1) < 1e-4) and np.all(np.abs(ez - 1) < 1e-4)


def test_graphite_like_physical_magnitudes(graphite):
    # in-plane response far exceeds out-of-plane at low frequency
    ex, ez = graphite(np.array([0.1, 1.0, 10.0]))
    assert np.all(ex > ez)
    gx, gz = graphite_like()
    np.testing.assert_allclose(ex, gx(np.array([0.1, 1.0, 10.0])), rtol=2e-3)


@pytest.mark.parametrize("which", ["table", "analytic", "constant"])
def test_monotone_and_above_one(graphite, which):
    if which == "table":
        m = graphite
    elif which == "analytic":
        m = build_permittivity(*graphite_like())
    else:
        m = build_permittivity(ConstantResponse(3.0), 1.0)
    xi = np.concatenate([[0.0], np.geomspace(1e-6, 1e6, 2000)])
    for eps in m(xi):
        assert np.all(eps >= 1.0)
        assert np.all(np.diff(eps) <= 0)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.5, 20), st.floats(0.5, 20), st.floats(0.05, 5))
def test_lorentz_monotone_property(wp, w0, g):
    table = _synthetic(LorentzDrude(oscillators=((wp, w0, g),)), w0)
    eps = kramers_kronig(table, np.geomspace(1e-3, 1e4, 60), Extrapolation("constant"))
    assert np.all(eps >= 1) and np.all(np.diff(eps) <= 0)
