import numpy as np
import pytest

from measfridge.baths import BathSpec
from measfridge.generators import Device, superoperator_matrix

# filled by tests/test_acceptance.py, printed at the end of the session
CRITERIA: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in sorted(CRITERIA, key=lambda c: int(c[0].split()[1])):
        terminalreporter.write_line(f"{name}: {'PASS' if ok else 'FAIL'}  {detail}")


def dots(t_left=1.0, t_right=1.0, gamma=0.2, gamma_m=0.0, mode="diagonal"):
    return Device(
        BathSpec("L", "fermionic", t_left, "flat", gamma),
        BathSpec("R", "fermionic", t_right, "flat", gamma),
        gamma_m,
        mode,
    )


def qubits(t_left=1.0, t_right=1.0, upsilon=0.1, cutoff=100.0, gamma_m=0.0, mode="diagonal", right="linear"):
    return Device(
        BathSpec("L", "bosonic", t_left, "ohmic", upsilon, cutoff),
        BathSpec("R", "bosonic", t_right, "ohmic", upsilon, cutoff, right),
        gamma_m,
        mode,
    )


def redfield_oracle(rate_set, eigen):
    """Generic Bloch-Redfield dissipator for jumps |0><alpha| split over (+, -).

    Written directly on 3x3 density matrices; shares nothing with the
    hand-derived matrix elements except the rates themselves.
    """
    s, c = eigen.sin_theta, eigen.cos_theta
    amps = (c, -s) if rate_set.side == "L" else (s, c)
    lower = []
    for m in range(2):
        a = np.zeros((3, 3))
        a[0, m + 1] = amps[m]
        lower.append(a)
    raise_ = [a.T for a in lower]

    def action(rho):
        out = np.zeros((3, 3), dtype=complex)
        for ops, g in ((lower, rate_set.down_tilde), (raise_, rate_set.up_tilde)):
            for i in range(2):
                for j in range(2):
                    ai, aj = ops[i], ops[j]
                    out += 0.5 * (g[i] + g[j]) * ai @ rho @ aj.T
                    out -= 0.5 * g[i] * aj.T @ ai @ rho + 0.5 * g[j] * rho @ aj.T @ ai
        return out

    return superoperator_matrix(action, "coherent")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
