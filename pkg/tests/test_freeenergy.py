import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from casipol.constants import CONSTANTS, ThermalGeometry
from casipol.freeenergy import (
    Cylinder,
    PFADomainError,
    Plate,
    QuadratureSettings,
    Semispace,
    SummationSettings,
    ZeroFrequencyMode,
    free_energy,
    free_energy_cylinder,
    free_energy_plate,
    free_energy_semispace,
    integrand_cylinder,
    integrand_plate,
)
from casipol.materials import build_permittivity
from casipol.polarizability import preset
from casipol.reflection import UniaxialLayer, r_parallel, r_perp
from _oracles import brute_force_free_energy

ATOM = preset("hydrogen-atom")
GENERIC = SummationSettings(zero_frequency_mode="generic")


class StaticOnly:
    """Toy particle polarizable only at zero frequency."""

    alpha0 = 4.5

    def alpha_au(self, xi):
        xi = np.asarray(xi, dtype=float)
        return np.where(xi == 0, self.alpha0, 0.0)


def test_integrand_vacuum():
    layer = UniaxialLayer(1.0, 1.0)
    assert integrand_plate(layer, 0.4, np.linspace(0.4, 5, 7)).tolist() == [0.0] * 7


def test_integrand_perfect_reflector_integral():
    # r_par = 1 at zeta = 0: int_0^inf 2 y^2 e^-y dy = 4
    metal = UniaxialLayer(math.inf, 5.0)
    val = quad(lambda y: integrand_plate(metal, 0.0, y), 0, math.inf)[0]
    assert val == pytest.approx(4.0, rel=1e-10)


def test_integrand_value():
    # e^-1 * (1 * 0.171572875... + 1 * 0.171572875...)
    assert integrand_plate(UniaxialLayer(2.0, 2.0), 1.0, 1.0) == pytest.approx(0.12623626693709833, rel=1e-14)


def test_cylinder_integrand_is_plate_times_bracket():
    layer = UniaxialLayer(7.0, 2.0, 0.8)
    y = np.linspace(0.5, 9, 13)
    b = 0.04
    z = 0.5
    direct = y * np.exp(-y) * (y - b) * ((2 - z * z / y**2) * r_parallel(layer, z, y) + z * z / y**2 * r_perp(layer, z, y))
    np.testing.assert_allclose(integrand_cylinder(layer, z, y, b), direct, rtol=1e-13)


def test_vacuum_layer_generic_is_zero():
    vac = build_permittivity(1.0, 1.0)
    res = free_energy_plate(ThermalGeometry(300, 3), vac, 10.0, ATOM, GENERIC)
    assert res.value == 0.0
    assert res.converged


def test_static_only_particle_metallic_mode():
    g = ThermalGeometry(300, 3)
    res = free_energy_plate(g, build_permittivity(5.0, 2.0), 10.0, StaticOnly())
    expected = -CONSTANTS.boltzmann_k * 300 * 4.5 * CONSTANTS.polarizability_au_nm3 / (4 * 27)
    assert res.value == pytest.approx(expected, rel=1e-14)


def test_generic_zero_term_for_metal_matches_metallic_form(graphite):
    # diverging in-plane eps(0) makes the generic l = 0 term equal 2 alpha(0)
    g = ThermalGeometry(300, 5)
    a = free_energy_semispace(g, graphite, ATOM)
    b = free_energy_semispace(g, graphite, ATOM, GENERIC)
    assert b.value == pytest.approx(a.value, rel=1e-9)


def test_generic_zero_term_dielectric():
    g = ThermalGeometry(300, 50)
    perm = build_permittivity(4.0, 4.0)
    res = free_energy(g, Semispace(), perm, StaticOnly(), GENERIC)
    # half of alpha(0) * 4 * (eps - 1)/(eps + 1)
    expected = -CONSTANTS.boltzmann_k * 300 / (8 * 50**3) * 0.5 * 4.5 * 4 * 0.6 * CONSTANTS.polarizability_au_nm3
    assert res.value == pytest.approx(expected, rel=1e-10)


def test_semispace_equals_thick_plate(graphite):
    g = ThermalGeometry(300, 3)
    s = free_energy_semispace(g, graphite, ATOM).value
    p = free_energy_plate(g, graphite, 1e6 * 3, ATOM).value
    assert p == pytest.approx(s, rel=1e-6)


def test_cylinder_static_geometry_factor():
    # R = a: sqrt(1/2) * (7/4) / 2 relative to the plate static term
    g = ThermalGeometry(300, 3)
    perm = build_permittivity(5.0, 2.0)
    plate = free_energy_plate(g, perm, 2.0, StaticOnly()).value
    with pytest.warns(RuntimeWarning, match="PFA"):
        cyl = free_energy_cylinder(g, Cylinder(3.0, 1.0), perm, StaticOnly(), allow_outside_pfa=True).value
    assert cyl / plate == pytest.approx(0.6187184335382291, rel=1e-13)


def test_cylinder_reduces_to_plate(graphite):
    g = ThermalGeometry(300, 3)
    plate = free_energy_plate(g, graphite, 30.0, ATOM).value
    cyl = free_energy_cylinder(g, Cylinder.from_thickness(3e6, 30.0), graphite, ATOM).value
    assert abs(cyl / plate - 1) < 1e-4


def test_pfa_precondition(graphite):
    g = ThermalGeometry(300, 40)
    with pytest.raises(PFADomainError, match=r"outside PFA validity a <= R/2"):
        free_energy_cylinder(g, Cylinder(50, 20), graphite, ATOM)
    with pytest.warns(RuntimeWarning):
        res = free_energy_cylinder(g, Cylinder(50, 20), graphite, ATOM, allow_outside_pfa=True)
    assert res.notes


def test_against_brute_force(graphite):
    g = ThermalGeometry(300, 3)
    ref = brute_force_free_energy(300, 3, graphite, 4.5, 11.65, d=30.0, R=50.0, h=0.02)
    got = free_energy_cylinder(g, Cylinder.from_thickness(50, 30), graphite, ATOM).value
    assert got == pytest.approx(ref, rel=1e-6)


def test_truncation_estimate_bound(graphite):
    s = SummationSettings()
    for a in (3, 30, 150):
        res = free_energy_semispace(ThermalGeometry(300, a), graphite, ATOM, s)
        assert res.converged
        assert abs(res.truncation_estimate) <= s.term_rel_tol * abs(res.value)


def test_tolerance_halving_within_estimate(graphite):
    g = ThermalGeometry(300, 10)
    base = free_energy_semispace(g, graphite, ATOM)
    tight = free_energy_semispace(g, graphite, ATOM, SummationSettings(term_rel_tol=5e-10),
                                  QuadratureSettings(rel_tol=5e-9))
    assert abs(tight.value - base.value) <= abs(base.truncation_estimate) + 1e-9 * abs(base.value)


def test_non_convergence_reported(graphite):
    with pytest.warns(RuntimeWarning, match="not converged"):
        res = free_energy_semispace(ThermalGeometry(300, 3), graphite, ATOM, SummationSettings(l_max_cap=50))
    assert not res.converged
    assert res.terms_used == 51


def test_order_independent_reduction(graphite):
    # the stored terms reduce identically in any order with an exactly rounded sum
    g = ThermalGeometry(300, 3)
    res = free_energy_semispace(g, graphite, ATOM)
    rng = np.random.default_rng(0)
    terms = rng.normal(size=5000) * np.exp(-np.linspace(0, 30, 5000))
    ordered = math.fsum(terms)
    assert all(math.fsum(rng.permutation(terms)) == ordered for _ in range(5))
    assert res.value < 0


def test_workers_do_not_change_result(graphite):
    g = ThermalGeometry(77, 3)
    one = free_energy_semispace(g, graphite, ATOM, workers=1)
    four = free_energy_semispace(g, graphite, ATOM, workers=4)
    assert one == four


def test_settings_validation():
    with pytest.raises(ValueError):
        SummationSettings(term_rel_tol=0.1)
    with pytest.raises(ValueError):
        SummationSettings(l_max_cap=5)
    with pytest.raises(ValueError):
        QuadratureSettings(rel_tol=1e-2)
    with pytest.raises(ValueError):
        Cylinder(10, 10)
    with pytest.raises(ValueError):
        Plate(0)
    assert SummationSettings(zero_frequency_mode="generic").zero_frequency_mode is ZeroFrequencyMode.GENERIC


# -- physical properties ------------------------------------------------------

def test_attractive_and_monotone_in_separation(graphite):
    a = np.geomspace(1, 200, 12)
    for body in (Semispace(), Plate(10.0), Cylinder.from_thickness(500, 30)):
        vals = [free_energy(ThermalGeometry(300, x), body, graphite, ATOM).value for x in a]
        assert all(v < 0 for v in vals)
        assert all(abs(v1) > abs(v2) for v1, v2 in zip(vals, vals[1:]))


def test_monotone_in_thickness(graphite):
    g = ThermalGeometry(300, 5)
    semi = abs(free_energy_semispace(g, graphite, ATOM).value)
    vals = [abs(free_energy_plate(g, graphite, d, ATOM).value) for d in np.geomspace(0.1, 1e4, 15)]
    assert all(v1 <= v2 for v1, v2 in zip(vals, vals[1:]))
    assert all(v <= semi * (1 + 1e-12) for v in vals)


def test_cylinder_weaker_than_plate(graphite):
    for a, R, d in ((3, 50, 30), (10, 40, 5), (1, 2.5, 1)):
        g = ThermalGeometry(300, a)
        c = free_energy_cylinder(g, Cylinder.from_thickness(R, d), graphite, ATOM).value
        p = free_energy_plate(g, graphite, d, ATOM).value
        assert abs(c) < abs(p)


@settings(max_examples=15, deadline=None)
@given(st.floats(1.0, 10.0), st.floats(1.0, 10.0), st.floats(1.0, 150.0), st.floats(10.0, 400.0))
def test_attraction_property(ex, ez, a, T):
    res = free_energy_semispace(ThermalGeometry(T, a), build_permittivity(ex, ez), ATOM,
                                SummationSettings(zero_frequency_mode="generic"))
    assert res.value <= 0
    if ex > 1 or ez > 1:
        assert res.value < 0
