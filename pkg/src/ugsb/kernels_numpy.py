"""Pure-numpy twins of the compiled kernels.

Same signatures, same tableau, same step control as
:mod:`ugsb.kernels_numba`; selected with ``UGSB_BACKEND=numpy`` or when
numba is unavailable.  Roughly two orders of magnitude slower on the
long trajectories, so meant for fallback and cross-checking.
"""

import numpy as np

from . import _dopri5 as dp


def _dense_terms(rows, cols, vals, ptr, omegas, dim):
    mats = np.zeros((omegas.shape[0], dim, dim), np.complex128)
    for k in range(omegas.shape[0]):
        sl = slice(ptr[k], ptr[k + 1])
        mats[k][rows[sl], cols[sl]] = vals[sl]
    return mats


def _rhs_states(t, y, mats, omegas, m, out):
    dim = mats.shape[1]
    phases = np.exp(1j * omegas * t)
    ht = np.tensordot(phases, mats, axes=(0, 0))
    np.matmul(ht, y.reshape(dim, m), out=out.reshape(dim, m))
    out *= -1j


def _rhs_density(t, rho, mats, omegas, l_src, l_dst, l_ptr, l_rate, g_diag, ht, out):
    dim = mats.shape[1]
    phases = np.exp(1j * omegas * t)
    np.copyto(ht, np.tensordot(phases, mats, axes=(0, 0)))
    r = rho.reshape(dim, dim)
    c = ht @ r
    o = out.reshape(dim, dim)
    np.copyto(o, -1j * (c - c.conj().T))
    for k in range(l_rate.shape[0]):
        lo, hi = l_ptr[k], l_ptr[k + 1]
        src = l_src[lo:hi]
        dst = l_dst[lo:hi]
        o[np.ix_(dst, dst)] += l_rate[k] * r[np.ix_(src, src)]
    o -= 0.5 * (g_diag[:, None] + g_diag[None, :]) * r


def _error_norm(err, y0, y1, rtol, atol):
    sc = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    q = np.abs(err) / sc
    return float(np.sqrt(np.mean(q * q)))


def _adaptive_loop(rhs, y0, t0, snap_times, rtol, atol, h_max):
    n = y0.shape[0]
    n_snap = snap_times.shape[0]
    snaps = np.empty((n_snap, n), np.complex128)
    y = y0.copy()
    k = [np.empty(n, np.complex128) for _ in range(7)]
    ytmp = np.empty(n, np.complex128)
    ynew = np.empty(n, np.complex128)

    t = t0
    h = h_max
    n_steps = 0
    n_rej = 0
    status = dp.OK
    rhs(t, y, k[0])

    for s in range(n_snap):
        target = snap_times[s]
        tiny = 1e-14 * max(abs(target), 1.0)
        while target - t > tiny:
            h = min(h, h_max)
            clipped = t + h >= target
            h_use = target - t if clipped else h
            np.copyto(ytmp, y + h_use * dp.A21 * k[0])
            rhs(t + dp.C2 * h_use, ytmp, k[1])
            np.copyto(ytmp, y + h_use * (dp.A31 * k[0] + dp.A32 * k[1]))
            rhs(t + dp.C3 * h_use, ytmp, k[2])
            np.copyto(
                ytmp, y + h_use * (dp.A41 * k[0] + dp.A42 * k[1] + dp.A43 * k[2])
            )
            rhs(t + dp.C4 * h_use, ytmp, k[3])
            np.copyto(
                ytmp,
                y
                + h_use
                * (dp.A51 * k[0] + dp.A52 * k[1] + dp.A53 * k[2] + dp.A54 * k[3]),
            )
            rhs(t + dp.C5 * h_use, ytmp, k[4])
            np.copyto(
                ytmp,
                y
                + h_use
                * (
                    dp.A61 * k[0]
                    + dp.A62 * k[1]
                    + dp.A63 * k[2]
                    + dp.A64 * k[3]
                    + dp.A65 * k[4]
                ),
            )
            rhs(t + h_use, ytmp, k[5])
            np.copyto(
                ynew,
                y
                + h_use
                * (
                    dp.B1 * k[0]
                    + dp.B3 * k[2]
                    + dp.B4 * k[3]
                    + dp.B5 * k[4]
                    + dp.B6 * k[5]
                ),
            )
            rhs(t + h_use, ynew, k[6])
            err = h_use * (
                dp.E1 * k[0]
                + dp.E3 * k[2]
                + dp.E4 * k[3]
                + dp.E5 * k[4]
                + dp.E6 * k[5]
                + dp.E7 * k[6]
            )
            enorm = _error_norm(err, y, ynew, rtol, atol)
            if enorm <= 1.0:
                t = target if clipped else t + h_use
                np.copyto(y, ynew)
                np.copyto(k[0], k[6])
                n_steps += 1
                fac = dp.MAX_SCALE if enorm == 0.0 else min(
                    dp.MAX_SCALE, max(dp.MIN_SCALE, dp.SAFETY * enorm**-0.2)
                )
                h = h_use * fac
            else:
                n_rej += 1
                fac = min(1.0, max(dp.MIN_SCALE, dp.SAFETY * enorm**-0.2))
                h = h_use * fac
            if h < 1e-14 * max(abs(t), 1.0):
                snaps[s] = y
                return snaps, n_steps, n_rej, dp.STEP_UNDERFLOW
        snaps[s] = y
    return snaps, n_steps, n_rej, status


def integrate_states(rows, cols, vals, ptr, omegas, dim, y0, t0, snap_times,
                     rtol, atol, h_max, m):
    mats = _dense_terms(rows, cols, vals, ptr, omegas, dim)

    def rhs(t, y, out):
        _rhs_states(t, y, mats, omegas, m, out)

    return _adaptive_loop(rhs, y0, t0, snap_times, rtol, atol, h_max)


def integrate_density(
    rows, cols, vals, ptr, omegas, dim, rho0, t0, snap_times, rtol, atol, h_max,
    l_src, l_dst, l_ptr, l_rate, g_diag,
):
    mats = _dense_terms(rows, cols, vals, ptr, omegas, dim)
    ht = np.empty((dim, dim), np.complex128)

    def rhs(t, y, out):
        _rhs_density(t, y, mats, omegas, l_src, l_dst, l_ptr, l_rate, g_diag, ht, out)

    return _adaptive_loop(rhs, rho0, t0, snap_times, rtol, atol, h_max)


def grid_average_overlap(m4, n_grid):
    beta = 2.0 * np.pi * np.arange(1, n_grid + 1) / n_grid
    sins, coss = np.sin(beta), np.cos(beta)
    phs = np.exp(1j * beta)
    acc = 0.0
    for j1 in range(n_grid):
        x0, c1 = sins[j1], coss[j1]
        for j2 in range(n_grid):
            u1 = c1 * sins[j2]
            c12 = c1 * coss[j2]
            for j3 in range(n_grid):
                u2 = c12 * sins[j3]
                u3 = c12 * coss[j3]
                c0 = np.full(n_grid**3, x0, dtype=np.complex128)
                cc1 = u1 * np.repeat(phs, n_grid**2)
                cc2 = u2 * np.tile(np.repeat(phs, n_grid), n_grid)
                cc3 = u3 * np.tile(phs, n_grid**2)
                cvec = np.stack([c0, cc1, cc2, cc3])
                q = np.einsum("ax,ab,bx->x", cvec.conj(), m4, cvec)
                acc += float(np.sum(q.real**2 + q.imag**2))
    return acc / n_grid**6
