"""Linear generators acting on the realified density-matrix sector.

A state is a real vector ``(rho00, rho++, rho--, Re rho+-, Im rho+-)`` in
``coherent`` mode, or its first three entries in ``diagonal`` mode. The
coherences rho_{0+-} never couple to this sector and are not tracked.
Generators are plain ``numpy`` arrays (5x5 or 3x3); the mode is carried by
the shape.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .baths import BathSpec, RateSet, rates
from .system import EigenBasis, SystemParams, diagonalize

DIAGONAL = "diagonal"
COHERENT = "coherent"
_DIM = {DIAGONAL: 3, COHERENT: 5}


def dim(mode: str) -> int:
    try:
        return _DIM[mode]
    except KeyError:
        raise ValueError(f"unknown mode {mode!r}; expected 'diagonal' or 'coherent'") from None


def mode_of(array: np.ndarray) -> str:
    n = np.shape(array)[-1]
    for mode, d in _DIM.items():
        if d == n:
            return mode
    raise ValueError(f"state/generator of size {n} matches no mode")


def population_trace(state: np.ndarray) -> float:
    return float(np.sum(np.asarray(state)[..., :3], axis=-1))


def to_density(state: np.ndarray) -> np.ndarray:
    """3x3 complex density matrix in the (0, +, -) basis."""
    rho = np.zeros((3, 3), dtype=complex)
    rho[0, 0], rho[1, 1], rho[2, 2] = state[0], state[1], state[2]
    if len(state) == 5:
        rho[1, 2] = state[3] + 1j * state[4]
        rho[2, 1] = state[3] - 1j * state[4]
    return rho


def from_density(rho: np.ndarray, mode: str) -> np.ndarray:
    out = [rho[0, 0].real, rho[1, 1].real, rho[2, 2].real]
    if mode == COHERENT:
        out += [rho[1, 2].real, rho[1, 2].imag]
    return np.array(out)


def superoperator_matrix(action, mode: str) -> np.ndarray:
    """Matrix of a linear map on density matrices, restricted to the tracked sector."""
    n = dim(mode)
    out = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        out[:, j] = from_density(action(to_density(e)), mode)
    return out


def measured_projector(eigen: EigenBasis) -> np.ndarray:
    """X = |R><R| in the (0, +, -) basis."""
    s, c = eigen.sin_theta, eigen.cos_theta
    return np.array([[0.0, 0.0, 0.0], [0.0, s * s, s * c], [0.0, s * c, c * c]])


def single_bath_generator(r: RateSet, eigen: EigenBasis, mode: str) -> np.ndarray:
    """Dissipator of one bath.

    The coherent block follows from the Bloch-Redfield form with jump operator
    |0><alpha| split into its (+, -) frequency components; principal-value
    (Lamb) shifts are dropped.
    """
    n = dim(mode)
    g = np.zeros((n, n))
    up, down = r.up, r.down
    g[0, 0] = -(up[0] + up[1])
    g[0, 1], g[0, 2] = down[0], down[1]
    g[1, 0], g[1, 1] = up[0], -down[0]
    g[2, 0], g[2, 2] = up[1], -down[1]
    if mode == DIAGONAL:
        return g
    # product of the |+>, |-> amplitudes of |alpha>
    k = eigen.sin_theta * eigen.cos_theta * (-1.0 if r.side == "L" else 1.0)
    ut, dt = r.up_tilde, r.down_tilde
    g[0, 3] = k * (dt[0] + dt[1])
    g[1, 3] = -k * dt[1]
    g[2, 3] = -k * dt[0]
    g[3, 0] = 0.5 * k * (ut[0] + ut[1])
    g[3, 1] = -0.5 * k * dt[0]
    g[3, 2] = -0.5 * k * dt[1]
    g[3, 3] = g[4, 4] = -0.5 * (down[0] + down[1])
    return g


def bath_generator(rate_sets, eigen: EigenBasis, mode: str) -> np.ndarray:
    n = dim(mode)
    total = np.zeros((n, n))
    for r in rate_sets:
        total += single_bath_generator(r, eigen, mode)
    return total


def measurement_generator(eigen: EigenBasis, gamma_m: float, mode: str) -> np.ndarray:
    """Record-averaged back-action Gamma_M (X rho X - {X, rho}/2) of monitoring X = |R><R|."""
    if gamma_m < 0:
        raise ValueError("measurement strength must be non-negative")
    x = measured_projector(eigen)

    def action(rho):
        return gamma_m * (x @ rho @ x - 0.5 * (x @ rho + rho @ x))

    return superoperator_matrix(action, mode)


def unitary_generator(eigen: EigenBasis, mode: str) -> np.ndarray:
    """-i[H_S, rho]: rotates rho+- as exp(-i (eps_+ - eps_-) t); zero in diagonal mode."""
    n = dim(mode)
    g = np.zeros((n, n))
    if mode == COHERENT:
        w = eigen.splitting
        g[3, 4] = w
        g[4, 3] = -w
    return g


def total_generator(*parts: np.ndarray) -> np.ndarray:
    shapes = {np.shape(p) for p in parts}
    if len(shapes) != 1:
        raise ValueError(f"generator mode mismatch: shapes {sorted(shapes)}")
    return np.sum(parts, axis=0)


def measurement_stochastic_increment(state, eigen: EigenBasis, gamma_m: float, dw: float) -> np.ndarray:
    """Innovation sqrt(2 Gamma_M) (X rho + rho X - 2<X> rho) dW for one time step.

    In diagonal mode the off-diagonal part of X rho + rho X is dropped and
    <X> uses populations only.
    """
    state = np.asarray(state, dtype=float)
    mode = mode_of(state)
    x = measured_projector(eigen)
    rho = to_density(state)
    mean_x = np.trace(x @ rho).real
    innovation = x @ rho + rho @ x - 2.0 * mean_x * rho
    return np.sqrt(2.0 * gamma_m) * dw * from_density(innovation, mode)


@dataclass(frozen=True)
class Device:
    """Two baths, a monitor of strength ``gamma_m``, and the bookkeeping mode."""

    left: BathSpec
    right: BathSpec
    gamma_m: float = 0.0
    mode: str = DIAGONAL

    def __post_init__(self):
        dim(self.mode)
        if self.left.side != "L" or self.right.side != "R":
            raise ValueError("left/right baths must carry sides 'L'/'R'")
        if self.gamma_m < 0:
            raise ValueError("measurement strength must be non-negative")

    @property
    def equal_temperatures(self) -> bool:
        return self.left.temperature == self.right.temperature

    def at(self, params: SystemParams) -> Snapshot:
        return Snapshot(self, params)


class Snapshot:
    """All generators of a device frozen at one parameter point."""

    def __init__(self, device: Device, params: SystemParams):
        self.device = device
        self.params = params
        self.eigen = diagonalize(params)
        self.rates_left = rates(device.left, self.eigen)
        self.rates_right = rates(device.right, self.eigen)

    @property
    def mode(self) -> str:
        return self.device.mode

    @cached_property
    def bath_left(self) -> np.ndarray:
        return single_bath_generator(self.rates_left, self.eigen, self.mode)

    @cached_property
    def bath_right(self) -> np.ndarray:
        return single_bath_generator(self.rates_right, self.eigen, self.mode)

    @cached_property
    def measurement(self) -> np.ndarray:
        return measurement_generator(self.eigen, self.device.gamma_m, self.mode)

    @cached_property
    def unitary(self) -> np.ndarray:
        return unitary_generator(self.eigen, self.mode)

    @cached_property
    def total(self) -> np.ndarray:
        return total_generator(self.bath_left, self.bath_right, self.measurement, self.unitary)

    def level_energies(self) -> np.ndarray:
        """Diagonal of H_S on the tracked sector (coherence entries carry no energy)."""
        e = np.zeros(dim(self.mode))
        e[1], e[2] = self.eigen.eps_plus, self.eigen.eps_minus
        return e
