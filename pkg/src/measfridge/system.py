"""Double-site Hamiltonian, its eigenbasis and periodic drives of the site energies.

The two models in this package (coupled quantum dots, coupled qubits) share
the single-excitation Hamiltonian

    H_S = e_L |L><L| + e_R |R><R| + coupling (|L><R| + |R><L|)

with a common ground state |0> pinned at zero energy.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class SystemParams:
    e_left: float
    e_right: float
    coupling: float

    def __post_init__(self):
        if self.coupling < 0:
            raise ValueError("coupling must be non-negative")


@dataclass(frozen=True)
class EigenBasis:
    """Eigen-decomposition with |L> = cos(t)|+> - sin(t)|->, |R> = sin(t)|+> + cos(t)|->.

    Level energies are measured from the ground state, so ``eps_plus`` and
    ``eps_minus`` are also the gaps eps_{+0}, eps_{-0}.
    """

    delta: float
    h: float
    theta: float
    sin_theta: float
    cos_theta: float
    eps_plus: float
    eps_minus: float

    @property
    def sin_2theta(self) -> float:
        return 2.0 * self.sin_theta * self.cos_theta

    @property
    def splitting(self) -> float:
        """eps_+ - eps_- (equals h)."""
        return self.eps_plus - self.eps_minus

    def site_hamiltonian(self) -> np.ndarray:
        """H_S restricted to span{|L>, |R>}, rebuilt from the eigen data."""
        s, c = self.sin_theta, self.cos_theta
        # columns: |L>, |R> expressed in the (+, -) basis
        basis = np.array([[c, s], [-s, c]])
        return basis.T @ np.diag([self.eps_plus, self.eps_minus]) @ basis


def diagonalize(params: SystemParams) -> EigenBasis:
    delta = params.e_left - params.e_right
    if params.coupling == 0 and delta == 0:
        raise ValueError("degenerate point (coupling = 0 and e_L = e_R): eigenbasis undefined")
    h = np.hypot(2.0 * params.coupling, delta)
    sin_t = np.sqrt((h - delta) / (2.0 * h))
    cos_t = np.sqrt((h + delta) / (2.0 * h))
    mean = 0.5 * (params.e_left + params.e_right)
    return EigenBasis(
        delta=delta,
        h=h,
        theta=float(np.arctan2(sin_t, cos_t)),
        sin_theta=sin_t,
        cos_theta=cos_t,
        eps_plus=mean + 0.5 * h,
        eps_minus=mean - 0.5 * h,
    )


def level_velocities(params: SystemParams, d_left: float, d_right: float) -> np.ndarray:
    """d(eps_+, eps_-)/dtau for site-energy velocities at fixed coupling."""
    eig = diagonalize(params)
    mean_rate = 0.5 * (d_left + d_right)
    h_rate = eig.delta * (d_left - d_right) / eig.h
    return np.array([mean_rate + 0.5 * h_rate, mean_rate - 0.5 * h_rate])


@dataclass(frozen=True)
class Harmonic:
    """p(tau) = offset + amplitude * cos(omega * tau + phase)."""

    offset: float
    amplitude: float = 0.0
    phase: float = 0.0


@dataclass(frozen=True)
class DriveProtocol:
    left: Harmonic
    right: Harmonic
    coupling: float
    omega: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("drive frequency must be positive")
        if self.coupling < 0:
            raise ValueError("coupling must be non-negative")

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega

    @property
    def is_static(self) -> bool:
        return self.left.amplitude == 0 and self.right.amplitude == 0

    def with_omega(self, omega: float) -> DriveProtocol:
        return replace(self, omega=omega)


def drive_at(protocol: DriveProtocol, tau: float) -> tuple[SystemParams, np.ndarray]:
    """Parameters at time ``tau`` and the site-energy velocities (de_L/dtau, de_R/dtau)."""
    w = protocol.omega
    values = []
    rates = []
    for p in (protocol.left, protocol.right):
        arg = w * tau + p.phase
        values.append(p.offset + p.amplitude * np.cos(arg))
        rates.append(-p.amplitude * w * np.sin(arg))
    return SystemParams(values[0], values[1], protocol.coupling), np.array(rates)
