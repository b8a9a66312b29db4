"""Time evolution, steady states and first-order adiabatic corrections."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .generators import (
    COHERENT,
    Device,
    dim,
    measured_projector,
    mode_of,
)
from .system import DriveProtocol, EigenBasis, SystemParams, drive_at


class NumericalError(RuntimeError):
    """A solver could not produce a trustworthy result."""


class GuardBandError(NumericalError):
    def __init__(self, step: int, trajectory: int = 0):
        self.step = step
        self.trajectory = trajectory
        super().__init__(
            f"population left [-0.01, 1.01] at step {step} of trajectory {trajectory}; reduce dt"
        )


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    dt: float
    seed: int | None = None


def _rk4_propagator(generator: np.ndarray, dt: float) -> np.ndarray:
    a = generator * dt
    eye = np.eye(len(a))
    a2 = a @ a
    return eye + a + a2 / 2 + a2 @ a / 6 + a2 @ a2 / 24


def evolve_deterministic(generator, state0, t_end: float, dt: float, every: int = 1) -> Trajectory:
    """Classic RK4 for the linear system d(rho)/dt = G rho on a fixed grid.

    For a constant linear generator one RK4 step is the degree-4 Taylor
    polynomial of exp(G dt); it is formed once and applied repeatedly.
    """
    generator = np.asarray(generator, dtype=float)
    radius = np.max(np.abs(np.linalg.eigvals(generator))) if generator.size else 0.0
    if dt <= 0 or dt * radius >= 0.5:
        raise NumericalError(f"step dt={dt} too large for spectral radius {radius:.4g}")
    n_steps = int(round(t_end / dt))
    step = _rk4_propagator(generator, dt)
    if every > 1:
        step = np.linalg.matrix_power(step, every)
    n_out = n_steps // every
    states = np.empty((n_out + 1, len(state0)))
    states[0] = state0
    for i in range(n_out):
        states[i + 1] = step @ states[i]
    times = np.arange(n_out + 1) * (every * dt)
    return Trajectory(times, states, dt)


def _check_stochastic_inputs(generator, state0, dt):
    generator = np.ascontiguousarray(generator, dtype=float)
    if dt <= 0:
        raise NumericalError("dt must be positive")
    return generator, mode_of(generator)


def evolve_stochastic(
    generator,
    eigen: EigenBasis,
    gamma_m: float,
    state0,
    t_end: float,
    dt: float,
    seed: int,
    every: int = 1,
) -> Trajectory:
    """One measurement-conditioned trajectory (Euler-Maruyama).

    ``generator`` is the record-averaged generator; the innovation of the
    monitored projector is added with dW ~ N(0, dt) drawn from
    ``numpy.random.default_rng(seed)``.
    """
    ens = evolve_ensemble(generator, eigen, gamma_m, state0, t_end, dt, seed, 1, every=every)
    return Trajectory(ens.times, ens.states[0], dt, seed)


@dataclass
class Ensemble:
    times: np.ndarray
    states: np.ndarray  # (n_trajectories, n_times, n)
    dt: float
    base_seed: int
    max_trace_step: float


def noise_increments(seed: int, n_steps: int, dt: float) -> np.ndarray:
    """Wiener increments of one trajectory; trajectory i of an ensemble uses base_seed + i."""
    return np.random.default_rng(seed).standard_normal(n_steps) * np.sqrt(dt)


def evolve_ensemble(
    generator,
    eigen: EigenBasis,
    gamma_m: float,
    state0,
    t_end: float,
    dt: float,
    base_seed: int,
    n_trajectories: int,
    every: int = 1,
    chunk: int = 1024,
    backend: str | None = None,
) -> Ensemble:
    """Independent trajectories with seeds base_seed, base_seed + 1, ...

    Output is independent of ``chunk`` and of the kernel backend up to
    floating-point summation order.
    """
    generator, mode = _check_stochastic_inputs(generator, state0, dt)
    state0 = np.asarray(state0, dtype=float)
    if len(state0) != dim(mode):
        raise ValueError("state and generator sizes differ")
    n_steps = int(round(t_end / dt))
    n_out = n_steps // every
    kern = kernels.get(backend)
    x = measured_projector(eigen)
    amp = np.sqrt(2.0 * gamma_m)
    states = np.empty((n_trajectories, n_out + 1, len(state0)))
    worst = 0.0
    for start in range(0, n_trajectories, chunk):
        stop = min(start + chunk, n_trajectories)
        dw = np.stack([noise_increments(base_seed + i, n_steps, dt) for i in range(start, stop)])
        init = np.tile(state0, (stop - start, 1))
        out, bad_traj, bad_step, max_dtr = kern.stochastic_ensemble(
            generator, float(x[1, 1]), float(x[1, 2]), float(x[2, 2]), amp, init, dw, dt, every, mode == COHERENT
        )
        if bad_traj >= 0:
            raise GuardBandError(bad_step, start + bad_traj)
        states[start:stop] = out
        worst = max(worst, max_dtr)
    times = np.arange(n_out + 1) * (every * dt)
    return Ensemble(times, states, dt, base_seed, worst)


def steady_state(generator) -> np.ndarray:
    """Unique normalized kernel vector of ``generator``.

    The population-balance row of rho00 is redundant (trace preservation) and
    is replaced by the normalization condition.
    """
    g = np.asarray(generator, dtype=float)
    n = len(g)
    svals = np.linalg.svd(g, compute_uv=False)
    scale = svals[0] if svals[0] > 0 else 0.0
    if scale == 0.0 or svals[-2] <= 1e-12 * scale:
        raise NumericalError("generator kernel is not one-dimensional; steady state not unique")
    a = g.copy()
    a[0, :] = 0.0
    a[0, :3] = 1.0
    b = np.zeros(n)
    b[0] = 1.0
    return np.linalg.solve(a, b)


def adiabatic_correction(generator, rhs) -> np.ndarray:
    """Traceless solution of G rho_a = rhs."""
    g = np.asarray(generator, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if abs(rhs[:3].sum()) > 1e-10:
        raise NumericalError(f"right-hand side has population trace {rhs[:3].sum():.3e}; expected 0")
    a = g.copy()
    a[0, :] = 0.0
    a[0, :3] = 1.0
    b = rhs.copy()
    b[0] = 0.0
    return np.linalg.solve(a, b)


def _steady_at(device: Device, params: SystemParams) -> np.ndarray:
    return steady_state(device.at(params).total)


def _central(device: Device, params: SystemParams, which: int, h: float) -> np.ndarray:
    shift = np.zeros(2)
    shift[which] = h
    plus = SystemParams(params.e_left + shift[0], params.e_right + shift[1], params.coupling)
    minus = SystemParams(params.e_left - shift[0], params.e_right - shift[1], params.coupling)
    return (_steady_at(device, plus) - _steady_at(device, minus)) / (2 * h)


def steady_state_gradient(device: Device, params: SystemParams, h_fd: float = 1e-5, rtol: float = 1e-4) -> np.ndarray:
    """d rho_i / d(e_L, e_R) as a (2, n) array.

    Central differences at h and h/2 combined by Richardson extrapolation;
    the two raw estimates must agree to ``rtol`` or the step is rejected.
    """
    out = np.empty((2, dim(device.mode)))
    for k in range(2):
        coarse = _central(device, params, k, h_fd)
        fine = _central(device, params, k, h_fd / 2)
        scale = np.max(np.abs(fine))
        if np.max(np.abs(fine - coarse)) > rtol * scale + 1e-9:
            raise NumericalError(f"finite differences did not converge for parameter {k}")
        out[k] = (4 * fine - coarse) / 3
    return out


def steady_state_derivative(
    device: Device, protocol: DriveProtocol, tau: float, h_fd: float = 1e-5
) -> tuple[np.ndarray, np.ndarray]:
    """(d rho_i/dtau, d rho_i/dU) along the drive at ``tau``."""
    params, velocity = drive_at(protocol, tau)
    grad = steady_state_gradient(device, params, h_fd)
    if not np.any(velocity):
        return np.zeros(dim(device.mode)), grad
    return velocity @ grad, grad
