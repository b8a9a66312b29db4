"""Heat currents, powers, coefficients of performance and cycle quantities.

Sign convention: every current or power is positive when energy flows *into*
the system (out of a bath, the monitor or the drive). Refrigeration of the
cold bath R therefore reads J_R > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np

from .baths import RateSet
from .generators import Device, Snapshot, mode_of, single_bath_generator, measurement_generator
from .solvers import adiabatic_correction, steady_state, steady_state_derivative, steady_state_gradient
from .system import DriveProtocol, EigenBasis, SystemParams, drive_at, level_velocities

NOT_A_REFRIGERATOR = math.nan
"""Returned by the COP helpers when the invested power is not positive."""


def _energies(eigen: EigenBasis, n: int) -> np.ndarray:
    e = np.zeros(n)
    e[1], e[2] = eigen.eps_plus, eigen.eps_minus
    return e


def heat_current(rates: RateSet, state, eigen: EigenBasis) -> float:
    """Tr[H_S L_alpha rho] for one bath.

    With populations only this is sum_m eps_m0 (gamma_0m rho00 - gamma_m0 rho_mm).
    """
    state = np.asarray(state, dtype=float)
    mode = mode_of(state)
    g = single_bath_generator(rates, eigen, mode)
    return float(_energies(eigen, len(state)) @ (g @ state))


def measurement_power(state, eigen: EigenBasis, gamma_m: float) -> float:
    """Tr[H_S L_M rho], the power delivered by the monitor."""
    state = np.asarray(state, dtype=float)
    g = measurement_generator(eigen, gamma_m, mode_of(state))
    return float(_energies(eigen, len(state)) @ (g @ state))


def driving_power(state, level_rates) -> float:
    """sum_m (d eps_m / d tau) rho_mm."""
    state = np.asarray(state, dtype=float)
    return float(level_rates[0] * state[1] + level_rates[1] * state[2])


def cop(j_r: float, p_d: float, j_m: float) -> float:
    denom = p_d + j_m
    if not denom > 0:
        return NOT_A_REFRIGERATOR
    return j_r / denom


def cop_instantaneous(j_r_i: float, j_m_i: float) -> float:
    return cop(j_r_i, 0.0, j_m_i)


@dataclass(frozen=True)
class StaticRecord:
    """Steady-state observables of an undriven device."""

    state: np.ndarray
    j_left: float
    j_right: float
    j_meas: float

    @property
    def first_law_residual(self) -> float:
        return self.j_left + self.j_right + self.j_meas


def static_observables(device: Device, params: SystemParams) -> StaticRecord:
    snap = device.at(params)
    rho = steady_state(snap.total)
    e = snap.level_energies()
    return StaticRecord(
        rho,
        float(e @ (snap.bath_left @ rho)),
        float(e @ (snap.bath_right @ rho)),
        float(e @ (snap.measurement @ rho)),
    )


@dataclass(frozen=True)
class ThermoRecord:
    tau: float
    j_left_i: float
    j_left_a: float
    j_right_i: float
    j_right_a: float
    j_meas_i: float
    j_meas_a: float
    p_drive_i: float
    p_drive_a: float
    trace_i: float
    trace_a: float

    @property
    def j_left(self) -> float:
        return self.j_left_i + self.j_left_a

    @property
    def j_right(self) -> float:
        return self.j_right_i + self.j_right_a

    @property
    def j_meas(self) -> float:
        return self.j_meas_i + self.j_meas_a

    @property
    def p_drive(self) -> float:
        return self.p_drive_i + self.p_drive_a


def point_record(device: Device, protocol: DriveProtocol, tau: float, h_fd: float = 1e-5) -> ThermoRecord:
    """Instantaneous and first-order adiabatic observables at drive phase ``tau``."""
    params, velocity = drive_at(protocol, tau)
    snap = device.at(params)
    rho_i = steady_state(snap.total)
    drho, _ = steady_state_derivative(device, protocol, tau, h_fd)
    rho_a = adiabatic_correction(snap.total, drho)
    e = snap.level_energies()
    deps = level_velocities(params, *velocity)

    def flux(g):
        return float(e @ (g @ rho_i)), float(e @ (g @ rho_a))

    jl = flux(snap.bath_left)
    jr = flux(snap.bath_right)
    jm = flux(snap.measurement)
    return ThermoRecord(
        tau, *jl, *jr, *jm,
        driving_power(rho_i, deps), driving_power(rho_a, deps),
        float(rho_i[:3].sum()), float(rho_a[:3].sum()),
    )


@dataclass(frozen=True)
class CycleSummary:
    """Period averages (periodic trapezoid) of the pointwise records."""

    omega: float
    j_left_i: float
    j_left_a: float
    j_right_i: float
    j_right_a: float
    j_meas_i: float
    j_meas_a: float
    p_drive_i: float
    p_drive_a: float
    j_right_int: float = math.nan
    kappa: float = math.nan

    @property
    def j_left(self) -> float:
        return self.j_left_i + self.j_left_a

    @property
    def j_right(self) -> float:
        return self.j_right_i + self.j_right_a

    @property
    def j_meas(self) -> float:
        return self.j_meas_i + self.j_meas_a

    @property
    def p_drive(self) -> float:
        return self.p_drive_i + self.p_drive_a

    @property
    def energy_residual(self) -> float:
        return self.p_drive + self.j_left + self.j_right + self.j_meas

    @property
    def work_meas_geometric(self) -> float:
        """Adiabatic work by the monitor per cycle, 2 pi J_M^(a) / Omega."""
        return 2 * math.pi * self.j_meas_a / self.omega

    @property
    def cop(self) -> float:
        return cop(self.j_right, self.p_drive, self.j_meas)

    @property
    def cop_instantaneous(self) -> float:
        return cop_instantaneous(self.j_right_i, self.j_meas_i)


def cycle_nodes(protocol: DriveProtocol, n_grid: int) -> np.ndarray:
    if n_grid < 16:
        raise ValueError("n_grid must be at least 16")
    return np.arange(n_grid) * (protocol.period / n_grid)


def cycle_records(device: Device, protocol: DriveProtocol, n_grid: int = 128) -> list[ThermoRecord]:
    return [point_record(device, protocol, tau) for tau in cycle_nodes(protocol, n_grid)]


def periodic_mean(values) -> float:
    """Trapezoid average over one period sampled at n uniform nodes (endpoint excluded)."""
    return float(np.mean(values))


def _summarize(protocol: DriveProtocol, records: list[ThermoRecord]) -> CycleSummary:
    names = [f.name for f in fields(CycleSummary)][1:9]
    return CycleSummary(protocol.omega, *(periodic_mean([getattr(r, k) for r in records]) for k in names))


def cycle_average(
    device: Device, protocol: DriveProtocol, n_grid: int = 128, interplay: bool = False
) -> CycleSummary:
    summary = _summarize(protocol, cycle_records(device, protocol, n_grid))
    if interplay:
        summary = replace(summary, j_right_int=interplay_from(device, protocol, summary, n_grid))
    if device.equal_temperatures:
        summary = replace(summary, kappa=_kappa_from(summary))
    return summary


def interplay_from(device: Device, protocol: DriveProtocol, summary: CycleSummary, n_grid: int) -> float:
    if device.gamma_m == 0:
        return 0.0
    bare = _summarize(protocol, cycle_records(replace(device, gamma_m=0.0), protocol, n_grid))
    return summary.j_right_a - bare.j_right_a


def interplay_current(device: Device, protocol: DriveProtocol, n_grid: int = 128) -> float:
    """J_R^(a) with monitoring minus J_R^(a) without it."""
    summary = cycle_average(device, protocol, n_grid)
    return interplay_from(device, protocol, summary, n_grid)


def _kappa_from(summary: CycleSummary) -> float:
    denom = summary.j_meas_i + summary.p_drive
    if denom == 0 or not math.isfinite(denom):
        return math.nan
    return summary.j_meas_a / denom


def kappa(device: Device, protocol: DriveProtocol, n_grid: int = 128) -> float:
    """Geometric-to-dissipative work ratio; defined only for equal bath temperatures."""
    if not device.equal_temperatures:
        raise ValueError("kappa is defined only for T_L == T_R")
    if protocol.is_static:
        return math.nan
    return _kappa_from(cycle_average(device, protocol, n_grid))


def pumping_potential(device: Device, params: SystemParams, h_fd: float = 1e-5) -> np.ndarray:
    """Lambda_k = Tr[H_S L_M v_k] with G v_k = d rho_i / dU_k, for U = (e_L, e_R)."""
    snap: Snapshot = device.at(params)
    grad = steady_state_gradient(device, params, h_fd)
    e = snap.level_energies()
    return np.array([e @ (snap.measurement @ adiabatic_correction(snap.total, grad[k])) for k in range(2)])


def spectral_derivative(samples: np.ndarray) -> np.ndarray:
    """d/ds of periodic samples on s in [0, 2 pi), columnwise, via FFT."""
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    k = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        k[n // 2] = 0.0
    return np.fft.ifft(1j * k[:, None] * np.fft.fft(samples, axis=0), axis=0).real


def contour_work(device: Device, contour, coupling: float) -> float:
    """Line integral of Lambda along a closed contour sampled uniformly in its parameter.

    ``contour`` is an (N, 2) array of (e_L, e_R) points on s in [0, 2 pi) with
    the closing point omitted.
    """
    contour = np.asarray(contour, dtype=float)
    if contour.ndim != 2 or contour.shape[1] != 2 or len(contour) < 16:
        raise ValueError("contour must be an (N >= 16, 2) array")
    if np.allclose(contour[0], contour[-1]):
        raise ValueError("omit the closing point: samples must cover [0, 2 pi) once")
    steps = np.linalg.norm(np.diff(contour, axis=0), axis=1)
    if np.linalg.norm(contour[-1] - contour[0]) > 3 * steps.max():
        raise ValueError("contour is open: last sample is far from the first")
    tangent = spectral_derivative(contour)
    lam = np.array([pumping_potential(device, SystemParams(u[0], u[1], coupling)) for u in contour])
    return float(np.sum(lam * tangent) * (2 * np.pi / len(contour)))


def protocol_contour(protocol: DriveProtocol, n_grid: int, reparam=None) -> np.ndarray:
    """Sample the drive's closed path; ``reparam`` maps [0, 2 pi) monotonically onto itself."""
    s = np.arange(n_grid) * (2 * np.pi / n_grid)
    phase = s if reparam is None else reparam(s)
    tau = phase / protocol.omega
    pts = [drive_at(protocol, t)[0] for t in tau]
    return np.array([[p.e_left, p.e_right] for p in pts])


@dataclass(frozen=True)
class GeometricWork:
    line_integral: float
    from_current: float

    @property
    def relative_gap(self) -> float:
        scale = max(abs(self.line_integral), abs(self.from_current))
        return abs(self.line_integral - self.from_current) / scale if scale else 0.0


def geometric_work(device: Device, protocol: DriveProtocol, n_grid: int = 128) -> GeometricWork:
    """Adiabatic work by the monitor per cycle, computed two ways."""
    if protocol.is_static:
        return GeometricWork(0.0, 0.0)
    line = contour_work(device, protocol_contour(protocol, n_grid), protocol.coupling)
    summary = cycle_average(device, protocol, n_grid)
    return GeometricWork(line, summary.work_meas_geometric)
