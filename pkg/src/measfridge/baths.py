"""Bath statistics, spectral densities and transition rates.

Units: hbar = k_B = 1. Rates are indexed by eigenlevel in the order ``(+, -)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .system import EigenBasis

FERMIONIC = "fermionic"
BOSONIC = "bosonic"
FLAT = "flat"
OHMIC = "ohmic"
LINEAR = "linear"
QUADRATIC = "quadratic"

# Beyond this value of energy/temperature the exponential overflows; use the limits.
_EXP_GUARD = 700.0


class DomainError(ValueError):
    """Raised when a distribution or rate is evaluated outside its domain."""


@dataclass(frozen=True)
class BathSpec:
    """A thermal reservoir attached to one side of the double-site system.

    ``strength`` is the flat width Gamma_alpha (energy units) for ``flat``
    coupling, or the dimensionless prefactor Upsilon_alpha for ``ohmic``.
    """

    side: str
    statistics: str
    temperature: float
    coupling_kind: str = FLAT
    strength: float = 0.0
    cutoff: float | None = None
    nonlinearity: str = LINEAR

    def __post_init__(self):
        if self.side not in ("L", "R"):
            raise ValueError(f"side must be 'L' or 'R', got {self.side!r}")
        if self.statistics not in (FERMIONIC, BOSONIC):
            raise ValueError(f"unknown statistics {self.statistics!r}")
        if self.coupling_kind not in (FLAT, OHMIC):
            raise ValueError(f"unknown coupling kind {self.coupling_kind!r}")
        if self.nonlinearity not in (LINEAR, QUADRATIC):
            raise ValueError(f"unknown nonlinearity {self.nonlinearity!r}")
        if not self.temperature > 0:
            raise ValueError("temperature must be positive")
        if self.strength < 0:
            raise ValueError("strength must be non-negative")
        if self.coupling_kind == OHMIC and not (self.cutoff is not None and self.cutoff > 0):
            raise ValueError("ohmic coupling needs a positive cutoff")
        if self.nonlinearity == QUADRATIC and self.statistics != BOSONIC:
            raise ValueError("quadratic coupling requires bosonic statistics")


@dataclass(frozen=True)
class RateSet:
    """Transition rates of one bath between the ground state and the levels (+, -).

    ``up[m]`` is gamma_{0m} (0 -> m), ``down[m]`` is gamma_{m0} (m -> 0). The
    tilde variants omit the overlap weight lambda_{alpha,0m}.
    """

    side: str
    up: np.ndarray
    down: np.ndarray
    up_tilde: np.ndarray
    down_tilde: np.ndarray

    @classmethod
    def zero(cls, side: str) -> RateSet:
        z = np.zeros(2)
        return cls(side, z, z, z, z)


def occupation(statistics: str, energy: float, temperature: float) -> float:
    """Fermi-Dirac or Bose-Einstein occupation at zero chemical potential."""
    if not temperature > 0:
        raise DomainError("temperature must be positive")
    x = energy / temperature
    if statistics == FERMIONIC:
        if x > _EXP_GUARD:
            return 0.0
        if x < -_EXP_GUARD:
            return 1.0
        return 1.0 / (np.exp(x) + 1.0)
    if statistics == BOSONIC:
        if energy <= 0:
            raise DomainError(f"Bose-Einstein occupation undefined at energy {energy}")
        if x > _EXP_GUARD:
            return 0.0
        return 1.0 / np.expm1(x)
    raise ValueError(f"unknown statistics {statistics!r}")


def spectral_density(bath: BathSpec, omega: float) -> float:
    if bath.coupling_kind == FLAT:
        return bath.strength
    return bath.strength * omega * np.exp(-omega / bath.cutoff)


def overlap_weights(side: str, eigen: EigenBasis) -> np.ndarray:
    """lambda_{alpha,0+} and lambda_{alpha,0-}; they sum to one."""
    c2 = eigen.cos_theta**2
    s2 = eigen.sin_theta**2
    return np.array([c2, s2]) if side == "L" else np.array([s2, c2])


def _bare_rates(bath: BathSpec, gap: float, quanta: int) -> tuple[float, float]:
    """(emission, absorption) rates without overlap weight for one transition.

    ``quanta`` bath excitations of energy gap/quanta are exchanged per jump.
    Bosonic transitions below the ground state (gap < 0) use the KMS
    continuation: emission and absorption swap roles at |gap|.
    """
    if bath.statistics == FERMIONIC:
        f = occupation(FERMIONIC, gap, bath.temperature)
        g = spectral_density(bath, gap)
        return g * (1.0 - f), g * f
    if gap == 0:
        raise DomainError("bosonic transition at zero gap: occupation diverges")
    w = abs(gap) / quanta
    g = spectral_density(bath, w)
    n = occupation(BOSONIC, w, bath.temperature)
    emit, absorb = g * (1.0 + n) ** quanta, g * n**quanta
    if gap < 0:
        emit, absorb = absorb, emit
    return emit, absorb


def rates_linear(bath: BathSpec, eigen: EigenBasis) -> RateSet:
    if bath.nonlinearity != LINEAR:
        raise ValueError("rates_linear needs a linearly coupled bath")
    return _rates(bath, eigen, quanta=1)


def rates_nonlinear(bath: BathSpec, eigen: EigenBasis) -> RateSet:
    """Two-boson exchange with the right bath, evaluated at half the gap."""
    if bath.statistics != BOSONIC or bath.side != "R" or bath.nonlinearity != QUADRATIC:
        raise ValueError("non-linear rates apply only to a quadratic bosonic right bath")
    return _rates(bath, eigen, quanta=2)


def rates(bath: BathSpec, eigen: EigenBasis) -> RateSet:
    if bath.nonlinearity == QUADRATIC:
        return rates_nonlinear(bath, eigen)
    return rates_linear(bath, eigen)


def _rates(bath: BathSpec, eigen: EigenBasis, quanta: int) -> RateSet:
    down_t = np.empty(2)
    up_t = np.empty(2)
    for m, gap in enumerate((eigen.eps_plus, eigen.eps_minus)):
        down_t[m], up_t[m] = _bare_rates(bath, gap, quanta)
    lam = overlap_weights(bath.side, eigen)
    return RateSet(bath.side, lam * up_t, lam * down_t, up_t, down_t)
