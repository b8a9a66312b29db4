"""Time the stochastic ensemble kernel on the compiled and pure-Python backends.

    python3 benchmarks/bench_kernels.py [--trajectories N] [--repeat R]

Both backends see the same generator, noise and initial states, so the
outputs are also compared; a mismatch above 1e-12 is reported.
"""

import argparse
import time

import numpy as np

from measfridge import config, kernels
from measfridge.generators import measured_projector


def setup(mode, n_traj, n_steps, dt=0.005):
    cfg = config.preset("fig2")
    data = cfg.to_dict()
    data["mode"] = mode
    cfg = config.from_dict(data)
    snap = cfg.device().at(cfg.params())
    x = measured_projector(snap.eigen)
    rho0 = list(cfg.solver.initial_state) + ([0.0, 0.0] if mode == "coherent" else [])
    init = np.tile(rho0, (n_traj, 1)).astype(float)
    dw = np.random.default_rng(0).standard_normal((n_traj, n_steps)) * np.sqrt(dt)
    gm = cfg.measurement.gamma_m
    return (snap.total, x[1, 1], x[1, 2], x[2, 2], np.sqrt(2 * gm), init, dw, dt, 20, mode == "coherent")


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trajectories", type=int, default=200)
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    names = [n for n in ("python", "compiled") if n in kernels.BACKENDS]
    if len(names) < 2:
        print("compiled extension not available; timing the python backend only")
    print(f"{'mode':<10}{'backend':<10}{'seconds':>10}{'steps/s':>14}{'speedup':>9}")
    for mode in ("diagonal", "coherent"):
        args_k = setup(mode, args.trajectories, args.steps)
        results = {}
        for name in names:
            fn = kernels.BACKENDS[name].stochastic_ensemble
            results[name] = best_of(lambda: fn(*args_k), args.repeat)
        base = results["python"][0]
        for name in names:
            sec = results[name][0]
            rate = args.trajectories * args.steps / sec
            print(f"{mode:<10}{name:<10}{sec:>10.4f}{rate:>14.3e}{base / sec:>8.1f}x")
        if len(names) == 2:
            diff = np.max(np.abs(results["python"][1][0] - results["compiled"][1][0]))
            if diff > 1e-12:
                print(f"  warning: backends differ by {diff:.2e}")


if __name__ == "__main__":
    main()
