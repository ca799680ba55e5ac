import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from casipol.reflection import UniaxialLayer, coth_stable, f_axis, r_parallel, r_perp

SQ2 = math.sqrt(2.0)


def test_f_examples():
    assert f_axis(1.0, 1.0, 2.0) == pytest.approx(SQ2, rel=1e-15)
    assert f_axis(0.7, 0.3, 1.0) == 0.7
    assert f_axis(0.7, 0.0, 55.0) == 0.7


def test_f_domain_error():
    with pytest.raises(ValueError):
        f_axis(0.1, 1.0, 0.5)


def test_vacuum_reflects_nothing():
    layer = UniaxialLayer(1.0, 1.0, 0.4)
    assert r_parallel(layer, 0.3, 0.9) == 0.0
    assert r_perp(layer, 0.3, 0.9) == 0.0
    assert r_perp(UniaxialLayer(1.0, 7.0), 0.3, 0.9) == 0.0


def test_zero_frequency_perp_vanishes():
    assert r_perp(UniaxialLayer(30.0, 2.0), 0.0, 0.9) == 0.0


def test_semispace_examples():
    layer = UniaxialLayer(2.0, 2.0)
    # (2 - sqrt 2)/(2 + sqrt 2) and (sqrt 2 - 1)/(sqrt 2 + 1) are the same number
    assert r_parallel(layer, 1.0, 1.0) == pytest.approx(0.17157287525380988, rel=1e-14)
    assert r_perp(layer, 1.0, 1.0) == pytest.approx(0.17157287525380988, rel=1e-14)


def test_semispace_limit_form():
    layer = UniaxialLayer(9.0, 2.5)
    z, y = 0.8, 1.9
    fz, fx = f_axis(y, z, 2.5), f_axis(y, z, 9.0)
    s = math.sqrt(22.5)
    assert r_parallel(layer, z, y) == pytest.approx((s * y - fz) / (s * y + fz), rel=1e-14)
    assert r_perp(layer, z, y) == pytest.approx((fx - y) / (fx + y), rel=1e-14)


def test_vanishing_film():
    thin = UniaxialLayer(5.0, 3.0, 1e-9)
    assert abs(r_parallel(thin, 0.5, 0.7)) < 1e-7
    assert abs(r_perp(thin, 0.5, 0.7)) < 1e-7


def test_coth_stable():
    x = np.array([1e-8, 1e-3, 0.5, 3.0, 19.9])
    np.testing.assert_allclose(coth_stable(x), 1 / np.tanh(x), rtol=1e-12)
    assert coth_stable(25.0) == 1.0
    assert coth_stable(1e6) == 1.0


def test_corner_limit():
    layer = UniaxialLayer(4.0, 4.0)
    assert r_parallel(layer, 0.0, 0.0) == pytest.approx(3.0 / 5.0)
    assert r_parallel(layer, 0.0, 1e-300) == pytest.approx(3.0 / 5.0)
    assert r_perp(layer, 0.0, 0.0) == 0.0


def test_infinite_permittivity():
    metal = UniaxialLayer(math.inf, 2.0, 0.5)
    assert r_parallel(metal, 0.2, 0.5) == 1.0
    assert r_perp(metal, 0.2, 0.5) == 1.0
    assert r_perp(metal, 0.0, 0.5) == 0.0


def _iso_slab(eps, z, y, ratio, te=False):
    f = math.sqrt(y * y + z * z * (eps - 1))
    # (f - y)/(f + y) rewritten without cancellation
    r1 = z * z * (eps - 1) / (f + y) ** 2 if te else (eps * y - f) / (eps * y + f)
    if math.isinf(ratio):
        return r1
    e = math.exp(-2 * f * ratio)
    return r1 * -math.expm1(-2 * f * ratio) / (1 - r1 * r1 * e)


def test_isotropic_reduction_grid():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        eps = 10 ** rng.uniform(0, 3)
        z = rng.uniform(0, 50)
        y = z + rng.uniform(1e-3, 50)
        ratio = [math.inf, 10 ** rng.uniform(-2, 1.5)][rng.integers(2)]
        layer = UniaxialLayer(eps, eps, ratio)
        for got, want in ((r_parallel(layer, z, y), _iso_slab(eps, z, y, ratio)),
                          (r_perp(layer, z, y), _iso_slab(eps, z, y, ratio, te=True))):
            if want != 0:
                worst = max(worst, abs(got / want - 1))
    assert worst < 1e-12


eps_s = st.floats(1.0, 1e3)


@settings(max_examples=300)
@given(eps_s, eps_s, st.floats(0, 50), st.floats(0, 50), st.floats(1e-3, 100), st.floats(1.01, 10))
def test_bounds_and_thickness_monotone(ex, ez, z, dy, ratio, grow):
    y = z + dy
    if y == 0:
        return
    thin, thick, semi = (UniaxialLayer(ex, ez, ratio), UniaxialLayer(ex, ez, ratio * grow), UniaxialLayer(ex, ez))
    for r in (r_parallel, r_perp):
        a, b, c = r(thin, z, y), r(thick, z, y), r(semi, z, y)
        assert 0 <= a < 1 and 0 <= b < 1 and 0 <= c < 1
        assert a <= b * (1 + 1e-12) + 1e-300
        assert b <= c * (1 + 1e-12) + 1e-300


def test_invalid_layer():
    with pytest.raises(ValueError):
        UniaxialLayer(0.9, 2.0)
    with pytest.raises(ValueError):
        UniaxialLayer(2.0, 2.0, 0.0)
