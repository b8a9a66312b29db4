"""Task runners behind the command line: each turns a RunConfig into a table.

Tables are rectangular: one row per sweep point (``steady``, ``cycle``) or per
recorded time (``transient``). The last column, ``regime_warning``, is empty
when the global-master-equation window (bath strength below the inter-site
coupling, detuning well above it) holds and otherwise names the violated
condition(s).
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baths import spectral_density
from .config import RunConfig, from_dict, set_path
from .generators import COHERENT, Device, dim
from .solvers import evolve_deterministic, evolve_ensemble, steady_state
from .system import drive_at
from .thermo import (
    cop,
    cycle_average,
    cycle_nodes,
    interplay_from,
    static_observables,
)

# how far the detuning must exceed the coupling before the global basis is trusted
DETUNING_MARGIN = 2.0


@dataclass
class Table:
    header: list[str]
    rows: list[list] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        i = self.header.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


# regime checks


def regime_flags(device: Device, points) -> str:
    """Violated validity conditions over a set of SystemParams, ';'-joined."""
    flags = []
    gamma_hi = detune_lo = False
    for p in points:
        for bath, energy in ((device.left, p.e_left), (device.right, p.e_right)):
            if spectral_density(bath, abs(energy)) > p.coupling:
                gamma_hi = True
        if abs(p.e_left - p.e_right) < DETUNING_MARGIN * p.coupling:
            detune_lo = True
    if gamma_hi:
        flags.append("bath_strength_exceeds_coupling")
    if detune_lo:
        flags.append("detuning_not_large_vs_coupling")
    return ";".join(flags)


def _cycle_points(cfg: RunConfig):
    protocol = cfg.protocol()
    return [drive_at(protocol, t)[0] for t in cycle_nodes(protocol, cfg.solver.n_grid)]


# per-point tasks


def _variants(cfg: RunConfig) -> list[tuple[str, RunConfig]]:
    out = []
    for label, overrides in cfg.compare.items():
        data = cfg.to_dict()
        data["compare"] = {}
        for path, value in overrides.items():
            set_path(data, path, value)
        out.append((label, from_dict(data)))
    return out


def _steady_header(cfg: RunConfig) -> list[str]:
    cols = ["e_left", "e_right", "coupling", "gamma_m", "J_L", "J_R", "J_M", "first_law_residual", "cop"]
    cols += ["rho_00", "rho_pp", "rho_mm"]
    if cfg.mode == COHERENT:
        cols += ["rho_pm_re", "rho_pm_im"]
    cols += [f"J_R_{label}" for label in cfg.compare]
    return cols + ["regime_warning"]


def _steady_row(cfg: RunConfig) -> list:
    device, params = cfg.device(), cfg.params()
    rec = static_observables(device, params)
    row = [params.e_left, params.e_right, params.coupling, device.gamma_m]
    row += [rec.j_left, rec.j_right, rec.j_meas, rec.first_law_residual, cop(rec.j_right, 0.0, rec.j_meas)]
    row += list(rec.state)
    for _, variant in _variants(cfg):
        row.append(static_observables(variant.device(), variant.params()).j_right)
    row.append(regime_flags(device, [params]))
    return row


_CYCLE_COLUMNS = [
    "J_L", "J_R", "J_M", "P_D",
    "J_L_i", "J_L_a", "J_R_i", "J_R_a", "J_M_i", "J_M_a", "P_D_i", "P_D_a",
    "J_R_int", "W_M_a", "kappa", "cop", "cop_inst", "energy_residual",
]


def _cycle_header(cfg: RunConfig) -> list[str]:
    cols = ["omega", "coupling", "gamma_m"] + _CYCLE_COLUMNS
    for label in cfg.compare:
        cols += [f"J_R_{label}", f"cop_{label}"]
    return cols + ["regime_warning"]


def _cycle_row(cfg: RunConfig) -> list:
    device, protocol, n = cfg.device(), cfg.protocol(), cfg.solver.n_grid
    s = cycle_average(device, protocol, n)
    j_int = interplay_from(device, protocol, s, n)
    row = [protocol.omega, protocol.coupling, device.gamma_m]
    row += [s.j_left, s.j_right, s.j_meas, s.p_drive]
    row += [s.j_left_i, s.j_left_a, s.j_right_i, s.j_right_a, s.j_meas_i, s.j_meas_a, s.p_drive_i, s.p_drive_a]
    row += [j_int, s.work_meas_geometric, s.kappa, s.cop, s.cop_instantaneous, s.energy_residual]
    for _, variant in _variants(cfg):
        v = cycle_average(variant.device(), variant.protocol(), n)
        row += [v.j_right, v.cop]
    row.append(regime_flags(device, _cycle_points(cfg)))
    return row


_ROW = {"steady": _steady_row, "cycle": _cycle_row}
_HEADER = {"steady": _steady_header, "cycle": _cycle_header}


def _row_from_dict(args):
    task, data = args
    return _ROW[task](from_dict(data))


def point_configs(cfg: RunConfig) -> list[RunConfig]:
    """One config per sweep point (validated up front), or the config itself."""
    if cfg.sweep is None:
        return [cfg]
    return [cfg.with_value(cfg.sweep.parameter, v) for v in cfg.sweep_values()]


def run_points(cfg: RunConfig, jobs: int = 1) -> Table:
    task = cfg.resolved_task
    points = point_configs(cfg)
    header = _HEADER[task](cfg)
    lead = []
    if cfg.sweep is not None:
        header = [cfg.sweep.parameter] + header
        lead = [[v] for v in cfg.sweep_values()]
    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            # map preserves submission order, so rows come back by index
            rows = list(pool.map(_row_from_dict, [(task, p.to_dict()) for p in points]))
    else:
        rows = [_ROW[task](p) for p in points]
    if lead:
        rows = [a + r for a, r in zip(lead, rows)]
    return Table(header, rows)


# transient task


def initial_state(cfg: RunConfig) -> np.ndarray:
    n = dim(cfg.mode)
    if cfg.solver.initial_state is None:
        state = np.zeros(n)
        state[0] = 1.0
        return state
    state = np.zeros(n)
    given = np.asarray(cfg.solver.initial_state, dtype=float)
    state[: min(n, len(given))] = given[:n]
    return state


def run_transient(cfg: RunConfig, backend: str | None = None) -> Table:
    """Record-averaged J_R(t), a few seeded trajectories and an optional ensemble mean."""
    device, params = cfg.device(), cfg.params()
    snap = device.at(params)
    s = cfg.solver
    rho0 = initial_state(cfg)
    avg = evolve_deterministic(snap.total, rho0, s.t_end, s.dt, s.every)
    weight = snap.level_energies() @ snap.bath_right
    header = ["t", "J_R_avg"]
    cols = [avg.times, avg.states @ weight]
    if s.n_trajectories:
        ens = evolve_ensemble(
            snap.total, snap.eigen, device.gamma_m, rho0, s.t_end, s.dt,
            s.base_seed, s.n_trajectories, s.every, backend=backend,
        )
        for i in range(s.n_trajectories):
            header.append(f"J_R_traj_{i + 1}")
            cols.append(ens.states[i] @ weight)
    if s.n_ensemble:
        # ensemble seeds start after the displayed trajectories
        ens = evolve_ensemble(
            snap.total, snap.eigen, device.gamma_m, rho0, s.t_end, s.dt,
            s.base_seed + s.n_trajectories, s.n_ensemble, s.every, backend=backend,
        )
        j = ens.states @ weight
        header += ["J_R_ens_mean", "J_R_ens_se"]
        cols.append(j.mean(axis=0))
        cols.append(j.std(axis=0, ddof=1) / math.sqrt(s.n_ensemble) if s.n_ensemble > 1 else np.full(len(avg.times), math.nan))
    header.append("regime_warning")
    flag = regime_flags(device, [params])
    rows = [[c[k] for c in cols] + [flag] for k in range(len(avg.times))]
    return Table(header, rows)


def run(cfg: RunConfig, jobs: int = 1, backend: str | None = None) -> Table:
    if cfg.resolved_task == "transient":
        return run_transient(cfg, backend)
    return run_points(cfg, jobs)


def steady_reference(cfg: RunConfig) -> float:
    """Steady-state J_R of a static config (the long-time limit of J_R_avg)."""
    snap = cfg.device().at(cfg.params())
    rho = steady_state(snap.total)
    return float(snap.level_energies() @ (snap.bath_right @ rho))


def expected_rows(cfg: RunConfig) -> int:
    if cfg.resolved_task == "transient":
        n_steps = int(round(cfg.solver.t_end / cfg.solver.dt))
        return n_steps // cfg.solver.every + 1
    return cfg.sweep.points if cfg.sweep is not None else 1

