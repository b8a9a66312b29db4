# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Euler-Maruyama kernel; same contract as ``_kernels_py``."""

import numpy as np
from libc.math cimport fabs


def stochastic_ensemble(double[:, ::1] g, double xpp, double xpm, double xmm, double amp,
                        double[:, ::1] init, double[:, ::1] dw, double dt, Py_ssize_t every,
                        bint coherent):
    cdef Py_ssize_t m = dw.shape[0]
    cdef Py_ssize_t n_steps = dw.shape[1]
    cdef Py_ssize_t n = init.shape[1]
    cdef Py_ssize_t n_out = n_steps // every
    out_arr = np.empty((m, n_out + 1, n))
    cdef double[:, :, ::1] out = out_arr
    cdef double rho[5]
    cdef double inc[5]
    cdef double p0, pp, pm, cr, ci, mean_x, noise, acc, dtr
    cdef double xsum = xpp + xmm
    cdef double worst = 0.0
    cdef Py_ssize_t t, k, i, j, limit
    cdef Py_ssize_t bad_t = -1, bad_step = n_steps + 1
    cdef bint breached
    # report the earliest breach step, lowest trajectory index on ties, like
    # the stepwise numpy version; later trajectories only run up to that step
    for t in range(m):
        limit = n_steps if bad_t < 0 else bad_step - 1
        for i in range(n):
            rho[i] = init[t, i]
            out[t, 0, i] = rho[i]
        breached = False
        for k in range(limit):
            p0 = rho[0]
            pp = rho[1]
            pm = rho[2]
            if coherent:
                cr = rho[3]
                ci = rho[4]
                mean_x = xpp * pp + xmm * pm + 2.0 * xpm * cr
            else:
                mean_x = xpp * pp + xmm * pm
            noise = amp * dw[t, k]
            for i in range(n):
                acc = 0.0
                for j in range(n):
                    acc = acc + rho[j] * (g[i, j] * dt)
                inc[i] = acc
            inc[0] += noise * (-2.0 * mean_x * p0)
            if coherent:
                inc[1] += noise * (2.0 * (xpp * pp + xpm * cr) - 2.0 * mean_x * pp)
                inc[2] += noise * (2.0 * (xmm * pm + xpm * cr) - 2.0 * mean_x * pm)
                inc[3] += noise * (xsum * cr + xpm * (pp + pm) - 2.0 * mean_x * cr)
                inc[4] += noise * (xsum * ci - 2.0 * mean_x * ci)
            else:
                inc[1] += noise * (2.0 * xpp * pp - 2.0 * mean_x * pp)
                inc[2] += noise * (2.0 * xmm * pm - 2.0 * mean_x * pm)
            dtr = fabs(inc[0] + inc[1] + inc[2])
            if dtr > worst:
                worst = dtr
            for i in range(n):
                rho[i] = rho[i] + inc[i]
            for i in range(3):
                if rho[i] < -0.01 or rho[i] > 1.01:
                    breached = True
            if breached:
                bad_t = t
                bad_step = k + 1
                break
            if (k + 1) % every == 0:
                for i in range(n):
                    out[t, (k + 1) // every, i] = rho[i]
    if bad_t >= 0:
        return out_arr, bad_t, bad_step, worst
    return out_arr, -1, -1, worst
