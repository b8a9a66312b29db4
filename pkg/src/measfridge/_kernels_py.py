"""Pure numpy implementation of the hot loops; mirrors ``_kernels.pyx``.

Trajectories of a chunk are stepped together, so the Python-level loop runs
over time steps only.
"""

import numpy as np


def stochastic_ensemble(g, xpp, xpm, xmm, amp, init, dw, dt, every, coherent):
    """Euler-Maruyama for many trajectories of the monitored master equation.

    Returns ``(states, bad_trajectory, bad_step, max_trace_step)``. A run that
    leaves the population guard band stops at the earliest offending step and
    reports the lowest trajectory index at that step (``-1`` when none did).
    """
    rho = np.array(init, dtype=float)
    m, n_steps = dw.shape
    n_out = n_steps // every
    out = np.empty((m, n_out + 1, rho.shape[1]))
    out[:, 0] = rho
    gt = np.ascontiguousarray(g.T) * dt
    xsum = xpp + xmm
    worst = 0.0
    for k in range(n_steps):
        p0, pp, pm = rho[:, 0], rho[:, 1], rho[:, 2]
        if coherent:
            cr, ci = rho[:, 3], rho[:, 4]
            mean_x = xpp * pp + xmm * pm + 2.0 * xpm * cr
        else:
            mean_x = xpp * pp + xmm * pm
        noise = amp * dw[:, k]
        inc = rho @ gt
        inc[:, 0] += noise * (-2.0 * mean_x * p0)
        if coherent:
            inc[:, 1] += noise * (2.0 * (xpp * pp + xpm * cr) - 2.0 * mean_x * pp)
            inc[:, 2] += noise * (2.0 * (xmm * pm + xpm * cr) - 2.0 * mean_x * pm)
            inc[:, 3] += noise * (xsum * cr + xpm * (pp + pm) - 2.0 * mean_x * cr)
            inc[:, 4] += noise * (xsum * ci - 2.0 * mean_x * ci)
        else:
            inc[:, 1] += noise * (2.0 * xpp * pp - 2.0 * mean_x * pp)
            inc[:, 2] += noise * (2.0 * xmm * pm - 2.0 * mean_x * pm)
        worst = max(worst, float(np.max(np.abs(inc[:, 0] + inc[:, 1] + inc[:, 2]))))
        rho = rho + inc
        pops = rho[:, :3]
        bad = np.flatnonzero(np.any((pops < -0.01) | (pops > 1.01), axis=1))
        if bad.size:
            return out, int(bad[0]), k + 1, worst
        if (k + 1) % every == 0:
            out[:, (k + 1) // every] = rho
    return out, -1, -1, worst
