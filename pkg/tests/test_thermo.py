import math

import numpy as np
import pytest

from conftest import dots, qubits
from measfridge.solvers import steady_state
from measfridge.system import DriveProtocol, Harmonic, SystemParams
from measfridge.thermo import (
    NOT_A_REFRIGERATOR,
    contour_work,
    cop,
    cop_instantaneous,
    cycle_average,
    cycle_nodes,
    cycle_records,
    driving_power,
    heat_current,
    kappa,
    measurement_power,
    periodic_mean,
    point_record,
    protocol_contour,
    spectral_derivative,
    static_observables,
)

FIG4 = DriveProtocol(Harmonic(1.5, 0.2), Harmonic(0.3, 1.0, np.pi / 2), 0.15, 0.005)


def test_currents_match_generator_fluxes():
    dev = dots(1.2, 0.8, 0.2, 0.1, "coherent")
    snap = dev.at(SystemParams(4.0, 0.15, 0.5))
    rho = steady_state(snap.total)
    rec = static_observables(dev, SystemParams(4.0, 0.15, 0.5))
    assert heat_current(snap.rates_left, rho, snap.eigen) == pytest.approx(rec.j_left, abs=1e-16)
    assert heat_current(snap.rates_right, rho, snap.eigen) == pytest.approx(rec.j_right, abs=1e-16)
    assert measurement_power(rho, snap.eigen, 0.1) == pytest.approx(rec.j_meas, abs=1e-16)


def test_diagonal_heat_current_formula():
    dev = dots(1.2, 0.8, 0.2, 0.1)
    snap = dev.at(SystemParams(2.0, 3.0, 0.1))
    rho = np.array([0.5, 0.2, 0.3])
    r = snap.rates_right
    e = (snap.eigen.eps_plus, snap.eigen.eps_minus)
    ref = sum(e[m] * (r.up[m] * rho[0] - r.down[m] * rho[m + 1]) for m in range(2))
    assert heat_current(r, rho, snap.eigen) == pytest.approx(ref, rel=1e-14)


def test_hot_to_cold_flow_without_monitor():
    rec = static_observables(dots(1.5, 0.5, 0.2), SystemParams(2.0, 3.0, 0.1))
    assert rec.j_left > 0 > rec.j_right
    assert abs(rec.first_law_residual) < 1e-15
    assert rec.j_meas == 0.0


def test_monitor_heats_at_equal_temperature():
    rec = static_observables(dots(1.0, 1.0, 0.2, 0.05), SystemParams(2.0, 3.0, 0.3))
    assert rec.j_meas > 0


def test_cop_tags_non_refrigerators():
    assert cop(1.0, 0.5, 0.5) == 1.0
    assert math.isnan(cop(1.0, 0.0, 0.0))
    assert math.isnan(cop(1.0, -0.2, 0.1))
    assert math.isnan(NOT_A_REFRIGERATOR)
    assert cop_instantaneous(0.2, 0.4) == 0.5


def test_driving_power_formula():
    assert driving_power([0.1, 0.5, 0.4], [2.0, -1.0]) == pytest.approx(0.6)


def test_trace_bookkeeping_along_cycle():
    recs = cycle_records(dots(1.025, 0.975, 0.05, 0.08), FIG4, 32)
    for r in recs:
        assert abs(r.trace_i - 1) < 1e-12
        assert abs(r.trace_a) < 1e-12


def test_cycle_nodes_and_mean():
    nodes = cycle_nodes(FIG4, 16)
    assert len(nodes) == 16 and nodes[0] == 0.0
    assert nodes[-1] < FIG4.period
    with pytest.raises(ValueError):
        cycle_nodes(FIG4, 8)
    # trapezoid on a periodic grid integrates low harmonics exactly
    s = 2 * np.pi * np.arange(16) / 16
    assert periodic_mean(np.cos(s) ** 2) == pytest.approx(0.5, abs=1e-15)


def test_point_record_adiabatic_terms_scale_with_frequency():
    dev = dots(1.025, 0.975, 0.05, 0.08)
    a = point_record(dev, FIG4, 0.0)
    b = point_record(dev, FIG4.with_omega(0.01), 0.0)
    assert b.j_right_i == pytest.approx(a.j_right_i, rel=1e-12)
    assert b.j_right_a == pytest.approx(2 * a.j_right_a, rel=1e-8)


def test_static_drive_has_no_adiabatic_part():
    still = DriveProtocol(Harmonic(1.5), Harmonic(0.3), 0.15, 0.005)
    s = cycle_average(dots(1.0, 1.0, 0.05, 0.05), still, 16)
    assert s.j_right_a == 0.0 and s.p_drive == 0.0
    assert math.isnan(kappa(dots(1.0, 1.0, 0.05, 0.05), still, 16))


def test_kappa_requires_equal_temperatures():
    with pytest.raises(ValueError):
        kappa(dots(1.025, 0.975, 0.05, 0.08), FIG4, 16)
    k = kappa(dots(1.0, 1.0, 0.05, 0.05), FIG4, 32)
    assert math.isfinite(k)


def test_spectral_derivative_of_harmonics():
    s = 2 * np.pi * np.arange(32) / 32
    d = spectral_derivative(np.column_stack([np.sin(3 * s), np.cos(s)]))
    np.testing.assert_allclose(d[:, 0], 3 * np.cos(3 * s), atol=1e-12)
    np.testing.assert_allclose(d[:, 1], -np.sin(s), atol=1e-12)


def test_contour_input_validation():
    dev = dots(1.025, 0.975, 0.05, 0.08)
    c = protocol_contour(FIG4, 32)
    with pytest.raises(ValueError):
        contour_work(dev, np.vstack([c, c[:1]]), 0.15)
    with pytest.raises(ValueError):
        contour_work(dev, c[:10], 0.15)
    with pytest.raises(ValueError):
        contour_work(dev, c[:24], 0.15)  # open arc


def test_contour_work_reverses_with_orientation():
    dev = dots(1.025, 0.975, 0.05, 0.08)
    c = protocol_contour(FIG4, 32)
    fwd = contour_work(dev, c, 0.15)
    back = contour_work(dev, np.vstack([c[:1], c[:0:-1]]), 0.15)
    assert back == pytest.approx(-fwd, rel=1e-9)


def test_equal_temperature_second_law(rng):
    # uniform temperature: the monitor and the drive can only put energy in
    for _ in range(100):
        e_l, e_r = rng.uniform(0.5, 4.0, 2)
        g = rng.uniform(0.1, 0.6)
        if abs(e_l - e_r) < 2 * g:
            continue
        t = rng.uniform(0.5, 2.0)
        gm = rng.uniform(0.0, 0.5)
        mode = rng.choice(["diagonal", "coherent"])
        rec = static_observables(dots(t, t, 0.05, gm, mode), SystemParams(e_l, e_r, g))
        assert rec.j_meas >= -1e-15
    for gm in (0.0, 0.02, 0.1):
        s = cycle_average(dots(1.0, 1.0, 0.05, gm), FIG4, 32)
        assert s.p_drive >= 0
        assert s.j_meas >= 0


def test_bosonic_model_first_law():
    rec = static_observables(qubits(gamma_m=0.2, right="quadratic"), SystemParams(5.0, 3.0, 2.0))
    assert abs(rec.first_law_residual) < 1e-12
