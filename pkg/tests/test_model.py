import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq, minimize_scalar

from dicke_berry.model import (
    InvalidParameterError,
    ModelParams,
    adiabatic_energy,
    adiabatic_potential,
    from_physical,
    thermo_berry,
    thermo_sx,
    well_depth,
    well_minima,
)


def test_from_physical_critical_coupling():
    p = from_physical(1.0, 5.0, math.sqrt(2.5), 8)
    assert p.alpha == pytest.approx(1.0, abs=1e-14)
    assert p.big_d == 10.0


@pytest.mark.parametrize("lam, alpha", [(0.0, 0.0), (2.0, 1.6)])
def test_from_physical_alpha(lam, alpha):
    assert from_physical(1.0, 5.0, lam, 4).alpha == pytest.approx(alpha, abs=1e-14)


@pytest.mark.parametrize(
    "args",
    [(0.0, 5.0, 1.0, 4), (-1.0, 5.0, 1.0, 4), (1.0, 0.0, 1.0, 4), (1.0, 5.0, 1.0, 0), (1.0, 5.0, -1.0, 4)],
)
def test_from_physical_rejects(args):
    with pytest.raises(InvalidParameterError):
        from_physical(*args)


@pytest.mark.parametrize("kwargs", [dict(n_qubits=0, big_d=1, alpha=1), dict(n_qubits=1, big_d=0, alpha=1),
                                    dict(n_qubits=1, big_d=1, alpha=-0.1), dict(n_qubits=1.5, big_d=1, alpha=1)])
def test_model_params_validation(kwargs):
    with pytest.raises(InvalidParameterError):
        ModelParams(**kwargs)


@given(
    delta=st.floats(0.01, 100.0),
    lam=st.floats(0.0, 50.0),
    n=st.integers(1, 10_000),
)
def test_physical_round_trip(delta, lam, n):
    p = from_physical(1.0, delta, lam, n)
    d, l = p.to_physical()
    assert d == pytest.approx(delta, rel=1e-12)
    assert l == pytest.approx(lam, rel=1e-12, abs=1e-12)


def test_derived_parameters():
    p = ModelParams(4, 10.0, 2.0)
    assert p.big_l == pytest.approx(math.sqrt(40.0))
    assert p.delta == 5.0
    assert p.lam == pytest.approx(p.big_l / (2 * math.sqrt(2)))


def test_adiabatic_energy_values():
    p = ModelParams(1, 10.0, 1.0)
    assert adiabatic_energy(p, 0.0) == 10.0
    assert adiabatic_energy(p, 1.0) == pytest.approx(10.954451150103322, rel=1e-15)


def test_adiabatic_energy_even_and_bounded(rng):
    p = ModelParams(7, 3.0, 1.7)
    q = rng.normal(scale=5.0, size=100)
    np.testing.assert_allclose(adiabatic_energy(p, q), adiabatic_energy(p, -q), rtol=0, atol=0)
    assert np.all(adiabatic_energy(p, q) >= p.big_d)


def test_potential_at_origin():
    for p in [ModelParams(4, 10.0, 0.5), ModelParams(9, 3.0, 2.0)]:
        assert adiabatic_potential(p, 0.0) == pytest.approx(-p.n_qubits * p.delta, abs=1e-12)


def test_potential_minimum_value_double_well():
    p = ModelParams(4, 10.0, 2.0)
    q_m = well_minima(p)[1]
    assert q_m == pytest.approx(math.sqrt(30.0), rel=1e-14)
    assert adiabatic_potential(p, q_m) == pytest.approx(-25.0, abs=1e-10)
    assert well_depth(p) == pytest.approx(-25.0, abs=1e-12)
    found = minimize_scalar(lambda q: adiabatic_potential(p, q), bounds=(0.1, 20.0), method="bounded",
                            options={"xatol": 1e-12})
    assert found.fun == pytest.approx(-25.0, abs=1e-10)


def test_potential_single_well_below_critical():
    p = ModelParams(4, 10.0, 0.5)
    q = np.linspace(-20, 20, 4001)
    v = adiabatic_potential(p, q)
    assert q[np.argmin(v)] == 0.0
    assert well_minima(p) == [0.0]
    assert v[0] > 100  # confining


def test_well_minima_boundary_and_analytic_derivative():
    assert well_minima(ModelParams(4, 10.0, 1.0)) == [0.0]
    p = ModelParams(64, 10.0, 2.0)
    q_m = well_minima(p)[1]
    assert q_m == pytest.approx(21.908902300206645, rel=1e-14)
    h = 1e-4
    dv = (adiabatic_potential(p, q_m + h) - adiabatic_potential(p, q_m - h)) / (2 * h)
    assert abs(dv) < 1e-6


def test_minimizer_matches_closed_form_random(rng):
    for _ in range(50):
        p = ModelParams(int(rng.integers(1, 5000)), rng.uniform(1.0, 50.0), rng.uniform(1.05, 5.0))
        q_m = well_minima(p)[1]
        l2 = p.big_l**2

        # stationarity of V: q - (N/2) E'(q), with E' = L^2 q / (N E)
        def slope(q):
            return q - 0.5 * l2 * q / float(adiabatic_energy(p, q))

        root = brentq(slope, 1e-6 * q_m + 1e-9, 10.0 * q_m, xtol=1e-14, rtol=1e-15)
        assert root == pytest.approx(q_m, rel=1e-8)
        assert adiabatic_potential(p, root) == pytest.approx(well_depth(p), rel=1e-12)


def test_thermo_limits():
    assert thermo_sx(0.5) == -1.0
    assert thermo_sx(2.0) == -0.5
    assert thermo_sx(1.0) == -1.0
    assert thermo_sx(1.0 + 1e-12) == pytest.approx(-1.0, abs=1e-11)
    assert thermo_berry(0.9) == 0.0
    assert thermo_berry(2.0) == pytest.approx(math.pi / 2, rel=1e-15)
    assert thermo_berry(1e9) == pytest.approx(math.pi, rel=1e-8)
    assert thermo_berry(0.0) == 0.0


@given(st.floats(0.0, 1e6))
def test_thermo_berry_is_pi_times_one_plus_sx(alpha):
    assert thermo_berry(alpha) == pytest.approx(math.pi * (1 + thermo_sx(alpha)), abs=1e-15)
    assert -1.0 <= thermo_sx(alpha) < 0.0


def test_thermo_berry_kink_at_critical_point():
    h = 1e-6
    left = (thermo_berry(1.0) - thermo_berry(1.0 - h)) / h
    right = (thermo_berry(1.0 + h) - thermo_berry(1.0)) / h
    assert left == 0.0
    assert right - left == pytest.approx(math.pi, rel=1e-5)


def test_thermo_berry_increasing_above_critical():
    a = np.linspace(1.0, 50.0, 1000)
    assert np.all(np.diff(thermo_berry(a)) > 0)
    assert np.all(thermo_berry(a) < math.pi)


def test_vectorized_thermo():
    np.testing.assert_array_equal(thermo_sx([0.5, 2.0]), [-1.0, -0.5])
