"""numba-compiled integration and grid-average kernels.

Layouts: a batch of state columns is a flat complex vector of length
dim*m (column j of basis entry a sits at a*m + j); a density matrix is
flat of length dim*dim (entry (a, b) at a*dim + b).  The Hamiltonian
arrives as the sparse element layout of
:attr:`ugsb.hamiltonian.TimeDepHamiltonian.packed_sparse`:
H(t) = sum_k exp(i*omegas[k]*t) * sum_{e in term k} vals[e] |rows[e]><cols[e]|.

All kernels release the GIL so Monte Carlo samples can run on threads.
"""

import numpy as np
from numba import njit

from . import _dopri5 as dp

_JIT = dict(cache=True, nogil=True, fastmath=False)


@njit(**_JIT)
def _rhs_states(t, y, rows, cols, vals, ptr, omegas, dim, m, out):
    # out = -i H(t) y, y flat (dim*m,)
    n = dim * m
    for i in range(n):
        out[i] = 0.0j
    for k in range(omegas.shape[0]):
        w = omegas[k]
        if w == 0.0:
            ph = 1.0 + 0.0j
        else:
            wt = w * t
            ph = complex(np.cos(wt), np.sin(wt))
        for e in range(ptr[k], ptr[k + 1]):
            c = ph * vals[e]
            ro = rows[e] * m
            co = cols[e] * m
            for j in range(m):
                out[ro + j] += c * y[co + j]
    for i in range(n):
        out[i] *= -1.0j


@njit(**_JIT)
def _rhs_density(
    t, rho, rows, cols, vals, ptr, omegas, l_src, l_dst, l_ptr, l_rate, g_diag,
    dim, ht, out,
):
    # out = -i [H(t), rho] + dissipator, rho flat (dim*dim,)
    # C = H rho accumulated element-wise off the sparse layout; for
    # Hermitian H and rho the commutator is then C - C^dag.
    for a in range(dim):
        oa = a * dim
        for b in range(dim):
            ht[a, b] = 0.0j  # ht doubles as the C work buffer
            out[oa + b] = 0.0j
    for k in range(omegas.shape[0]):
        w = omegas[k]
        if w == 0.0:
            ph = 1.0 + 0.0j
        else:
            wt = w * t
            ph = complex(np.cos(wt), np.sin(wt))
        for e in range(ptr[k], ptr[k + 1]):
            c = ph * vals[e]
            r = rows[e]
            oc = cols[e] * dim
            for b in range(dim):
                ht[r, b] += c * rho[oc + b]
    for a in range(dim):
        oa = a * dim
        for b in range(dim):
            out[oa + b] = ht[a, b]
    for a in range(dim):
        oa = a * dim
        for b in range(a, dim):
            cab = out[oa + b]
            cba = out[b * dim + a]
            out[oa + b] = -1.0j * (cab - np.conj(cba))
            out[b * dim + a] = -1.0j * (cba - np.conj(cab))
    # jump terms: sum_k rate * L rho L^dag as index gathers
    for k in range(l_rate.shape[0]):
        lo, hi = l_ptr[k], l_ptr[k + 1]
        rate = l_rate[k]
        for ai in range(lo, hi):
            sa = l_src[ai] * dim
            da = l_dst[ai] * dim
            for bi in range(lo, hi):
                out[da + l_dst[bi]] += rate * rho[sa + l_src[bi]]
    # anticommutator with the (diagonal) total jump rate
    for a in range(dim):
        oa = a * dim
        ga = g_diag[a]
        for b in range(dim):
            out[oa + b] -= 0.5 * (ga + g_diag[b]) * rho[oa + b]


@njit(**_JIT)
def _error_norm(err, y0, y1, rtol, atol):
    n = err.shape[0]
    acc = 0.0
    for i in range(n):
        sc = atol + rtol * max(abs(y0[i]), abs(y1[i]))
        q = abs(err[i]) / sc
        acc += q * q
    return np.sqrt(acc / n)


@njit(**_JIT)
def integrate_states(rows, cols, vals, ptr, omegas, dim, y0, t0, snap_times,
                     rtol, atol, h_max, m):
    """Adaptive propagation of state columns, recorded at snap_times.

    Returns (snaps, n_steps, n_rejected, status)."""
    n = y0.shape[0]
    n_snap = snap_times.shape[0]
    snaps = np.empty((n_snap, n), np.complex128)
    y = y0.copy()
    ynew = np.empty(n, np.complex128)
    ytmp = np.empty(n, np.complex128)
    err = np.empty(n, np.complex128)
    k1 = np.empty(n, np.complex128)
    k2 = np.empty(n, np.complex128)
    k3 = np.empty(n, np.complex128)
    k4 = np.empty(n, np.complex128)
    k5 = np.empty(n, np.complex128)
    k6 = np.empty(n, np.complex128)
    k7 = np.empty(n, np.complex128)

    t = t0
    h = h_max
    n_steps = 0
    n_rej = 0
    status = dp.OK
    _rhs_states(t, y, rows, cols, vals, ptr, omegas, dim, m, k1)

    for s in range(n_snap):
        target = snap_times[s]
        tiny = 1e-14 * max(abs(target), 1.0)
        while target - t > tiny:
            if h > h_max:
                h = h_max
            clipped = False
            if t + h >= target:
                h_use = target - t
                clipped = True
            else:
                h_use = h
            for i in range(n):
                ytmp[i] = y[i] + h_use * dp.A21 * k1[i]
            _rhs_states(t + dp.C2 * h_use, ytmp, rows, cols, vals, ptr, omegas, dim, m, k2)
            for i in range(n):
                ytmp[i] = y[i] + h_use * (dp.A31 * k1[i] + dp.A32 * k2[i])
            _rhs_states(t + dp.C3 * h_use, ytmp, rows, cols, vals, ptr, omegas, dim, m, k3)
            for i in range(n):
                ytmp[i] = y[i] + h_use * (
                    dp.A41 * k1[i] + dp.A42 * k2[i] + dp.A43 * k3[i]
                )
            _rhs_states(t + dp.C4 * h_use, ytmp, rows, cols, vals, ptr, omegas, dim, m, k4)
            for i in range(n):
                ytmp[i] = y[i] + h_use * (
                    dp.A51 * k1[i] + dp.A52 * k2[i] + dp.A53 * k3[i] + dp.A54 * k4[i]
                )
            _rhs_states(t + dp.C5 * h_use, ytmp, rows, cols, vals, ptr, omegas, dim, m, k5)
            for i in range(n):
                ytmp[i] = y[i] + h_use * (
                    dp.A61 * k1[i]
                    + dp.A62 * k2[i]
                    + dp.A63 * k3[i]
                    + dp.A64 * k4[i]
                    + dp.A65 * k5[i]
                )
            _rhs_states(t + h_use, ytmp, rows, cols, vals, ptr, omegas, dim, m, k6)
            for i in range(n):
                ynew[i] = y[i] + h_use * (
                    dp.B1 * k1[i]
                    + dp.B3 * k3[i]
                    + dp.B4 * k4[i]
                    + dp.B5 * k5[i]
                    + dp.B6 * k6[i]
                )
            _rhs_states(t + h_use, ynew, rows, cols, vals, ptr, omegas, dim, m, k7)
            for i in range(n):
                err[i] = h_use * (
                    dp.E1 * k1[i]
                    + dp.E3 * k3[i]
                    + dp.E4 * k4[i]
                    + dp.E5 * k5[i]
                    + dp.E6 * k6[i]
                    + dp.E7 * k7[i]
                )
            enorm = _error_norm(err, y, ynew, rtol, atol)
            if enorm <= 1.0:
                t = target if clipped else t + h_use
                for i in range(n):
                    y[i] = ynew[i]
                    k1[i] = k7[i]
                n_steps += 1
                if enorm == 0.0:
                    fac = dp.MAX_SCALE
                else:
                    fac = dp.SAFETY * enorm**-0.2
                    if fac > dp.MAX_SCALE:
                        fac = dp.MAX_SCALE
                    elif fac < dp.MIN_SCALE:
                        fac = dp.MIN_SCALE
                h = h_use * fac
            else:
                n_rej += 1
                fac = dp.SAFETY * enorm**-0.2
                if fac < dp.MIN_SCALE:
                    fac = dp.MIN_SCALE
                elif fac > 1.0:
                    fac = 1.0
                h = h_use * fac
            if h < 1e-14 * max(abs(t), 1.0):
                status = dp.STEP_UNDERFLOW
                for i in range(n):
                    snaps[s, i] = y[i]
                return snaps, n_steps, n_rej, status
        for i in range(n):
            snaps[s, i] = y[i]
    return snaps, n_steps, n_rej, status


@njit(**_JIT)
def integrate_density(
    rows, cols, vals, ptr, omegas, dim, rho0, t0, snap_times, rtol, atol, h_max,
    l_src, l_dst, l_ptr, l_rate, g_diag,
):
    """Adaptive propagation of a density matrix under drive plus jumps.

    Returns (snaps, n_steps, n_rejected, status)."""
    n = dim * dim
    n_snap = snap_times.shape[0]
    snaps = np.empty((n_snap, n), np.complex128)
    y = rho0.copy()
    ynew = np.empty(n, np.complex128)
    ytmp = np.empty(n, np.complex128)
    err = np.empty(n, np.complex128)
    ht = np.empty((dim, dim), np.complex128)
    k1 = np.empty(n, np.complex128)
    k2 = np.empty(n, np.complex128)
    k3 = np.empty(n, np.complex128)
    k4 = np.empty(n, np.complex128)
    k5 = np.empty(n, np.complex128)
    k6 = np.empty(n, np.complex128)
    k7 = np.empty(n, np.complex128)

    t = t0
    h = h_max
    n_steps = 0
    n_rej = 0
    status = dp.OK
    _rhs_density(t, y, rows, cols, vals, ptr, omegas,
                 l_src, l_dst, l_ptr, l_rate, g_diag, dim, ht, k1)

    for s in range(n_snap):
        target = snap_times[s]
        tiny = 1e-14 * max(abs(target), 1.0)
        while target - t > tiny:
            if h > h_max:
                h = h_max
            clipped = False
            if t + h >= target:
                h_use = target - t
                clipped = True
            else:
                h_use = h
            for i in range(n):
                ytmp[i] = y[i] + h_use * dp.A21 * k1[i]
            _rhs_density(t + dp.C2 * h_use, ytmp, rows, cols, vals, ptr, omegas,
                         l_src, l_dst, l_ptr, l_rate, g_diag, dim, ht, k2)
            for i in range(n):
                ytmp[i] = y[i] + h_use * (dp.A31 * k1[i] + dp.A32 * k2[i])
            _rhs_density(t + dp.C3 * h_use, ytmp, rows, cols, vals, ptr, omegas,
                         l_src, l_dst, l_ptr, l_rate, g_diag, dim, ht, k3)
            for i in range(n):
                ytmp[i] = y[i] + h_use * (
                    dp.A41 * k1[i] + dp.A42 * k2[i] + dp.A43 * k3[i]
                )
            _rhs_density(t + dp.C4 * h_use, ytmp, rows, cols, vals, ptr, omegas,
                         l_src, l_dst, l_ptr, l_rate, g_diag, dim, ht, k4)
            for i in range(n):
                ytmp[i] = y[i] + h_use * (
                    dp.A51 * k1[i] + dp.A52 * k2[i] + dp.A53 * k3[i] + dp.A54 * k4[i]
                )
            _rhs_density(t + dp.C5 * h_use, ytmp, rows, cols, vals, ptr, omegas,
                         l_src, l_dst, l_ptr, l_rate, g_diag, dim, ht, k5)
            for i in range(n):
                ytmp[i] = y[i] + h_use * (
                    dp.A61 * k1[i]
                    + dp.A62 * k2[i]
                    + dp.A63 * k3[i]
                    + dp.A64 * k4[i]
                    + dp.A65 * k5[i]
                )
            _rhs_density(t + h_use, ytmp, rows, cols, vals, ptr, omegas,
                         l_src, l_dst, l_ptr, l_rate, g_diag, dim, ht, k6)
            for i in range(n):
                ynew[i] = y[i] + h_use * (
                    dp.B1 * k1[i]
                    + dp.B3 * k3[i]
                    + dp.B4 * k4[i]
                    + dp.B5 * k5[i]
                    + dp.B6 * k6[i]
                )
            _rhs_density(t + h_use, ynew, rows, cols, vals, ptr, omegas,
                         l_src, l_dst, l_ptr, l_rate, g_diag, dim, ht, k7)
            for i in range(n):
                err[i] = h_use * (
                    dp.E1 * k1[i]
                    + dp.E3 * k3[i]
                    + dp.E4 * k4[i]
                    + dp.E5 * k5[i]
                    + dp.E6 * k6[i]
                    + dp.E7 * k7[i]
                )
            enorm = _error_norm(err, y, ynew, rtol, atol)
            if enorm <= 1.0:
                t = target if clipped else t + h_use
                for i in range(n):
                    y[i] = ynew[i]
                    k1[i] = k7[i]
                n_steps += 1
                if enorm == 0.0:
                    fac = dp.MAX_SCALE
                else:
                    fac = dp.SAFETY * enorm**-0.2
                    if fac > dp.MAX_SCALE:
                        fac = dp.MAX_SCALE
                    elif fac < dp.MIN_SCALE:
                        fac = dp.MIN_SCALE
                h = h_use * fac
            else:
                n_rej += 1
                fac = dp.SAFETY * enorm**-0.2
                if fac < dp.MIN_SCALE:
                    fac = dp.MIN_SCALE
                elif fac > 1.0:
                    fac = 1.0
                h = h_use * fac
            if h < 1e-14 * max(abs(t), 1.0):
                status = dp.STEP_UNDERFLOW
                for i in range(n):
                    snaps[s, i] = y[i]
                return snaps, n_steps, n_rej, status
        for i in range(n):
            snaps[s, i] = y[i]
    return snaps, n_steps, n_rej, status


@njit(**_JIT)
def grid_average_overlap(m4, n_grid):
    """Mean of |<c|M|c>|^2 over the six-angle product grid.

    The grid states are c = (sin b1, e^{i b4} cos b1 sin b2,
    e^{i b5} cos b1 cos b2 sin b3, e^{i b6} cos b1 cos b2 cos b3) with
    each angle taking n_grid values uniform over (0, 2pi]."""
    sins = np.empty(n_grid)
    coss = np.empty(n_grid)
    phs = np.empty(n_grid, np.complex128)
    for i in range(n_grid):
        beta = 2.0 * np.pi * (i + 1) / n_grid
        sins[i] = np.sin(beta)
        coss[i] = np.cos(beta)
        phs[i] = complex(np.cos(beta), np.sin(beta))
    acc = 0.0
    for j1 in range(n_grid):
        x0 = sins[j1]
        c1 = coss[j1]
        d00 = x0 * x0 * m4[0, 0]
        for j2 in range(n_grid):
            u1 = c1 * sins[j2]
            c12 = c1 * coss[j2]
            d01 = d00 + u1 * u1 * m4[1, 1]
            for j3 in range(n_grid):
                u2 = c12 * sins[j3]
                u3 = c12 * coss[j3]
                qs = d01 + u2 * u2 * m4[2, 2] + u3 * u3 * m4[3, 3]
                a01 = x0 * u1
                a02 = x0 * u2
                a03 = x0 * u3
                a12 = u1 * u2
                a13 = u1 * u3
                a23 = u2 * u3
                for j4 in range(n_grid):
                    p4 = phs[j4]
                    p4c = np.conj(p4)
                    q4 = qs + a01 * (m4[0, 1] * p4 + m4[1, 0] * p4c)
                    for j5 in range(n_grid):
                        p5 = phs[j5]
                        p5c = np.conj(p5)
                        q45 = (
                            q4
                            + a02 * (m4[0, 2] * p5 + m4[2, 0] * p5c)
                            + a12 * (m4[1, 2] * p4c * p5 + m4[2, 1] * p4 * p5c)
                        )
                        w6 = a03 * m4[0, 3] + a13 * p4c * m4[1, 3] + a23 * p5c * m4[2, 3]
                        v6 = a03 * m4[3, 0] + a13 * p4 * m4[3, 1] + a23 * p5 * m4[3, 2]
                        for j6 in range(n_grid):
                            p6 = phs[j6]
                            q = q45 + w6 * p6 + v6 * np.conj(p6)
                            acc += q.real * q.real + q.imag * q.imag
    return acc / n_grid**6
