"""Wall-time comparison of the numba kernels against the numpy fallback.

Run directly:  python benchmarks/bench_integrator.py [--repeat N]

Covers the three hot paths: a state trajectory at the 87Rb working
point, an open-system (density matrix) segment, and the six-angle
average-fidelity grid.  The numpy fallback exists for environments
without a compiler toolchain and for cross-checking; the compiled path
is what makes the Monte Carlo scans practical.
"""

import argparse
import time

import numpy as np

from ugsb.backend import set_backend
from ugsb.dynamics import DecayModel, integrate_lindblad, integrate_schrodinger
from ugsb.gates import InitialStateGrid, average_fidelity, swap_gate
from ugsb.hamiltonian import build_rotated_hamiltonian
from ugsb.params import symmetric_paramset
from ugsb.perturbation import choose_v_for_delta
from ugsb.units import mhz


def base_params(with_leak=False):
    p = symmetric_paramset(mhz(10.0), mhz(100.0), mhz(300.0), v=mhz(200.0))
    p = p.with_v(choose_v_for_delta(p, 0.0))
    return p.with_leak() if with_leak else p


def bench_state(t_end=2.1213):
    p = base_params()
    h = build_rotated_hamiltonian(p, "v0")
    psi0 = p.scheme.basis_state("01")
    traj = integrate_schrodinger(h, psi0, (0, t_end), [t_end], rtol=1e-10)
    return traj.n_steps


def bench_density(t_end=0.5):
    p = base_params(with_leak=True)
    h = build_rotated_hamiltonian(p, "v0")
    psi0 = p.scheme.basis_state("01")
    rho0 = np.outer(psi0, psi0.conj())
    traj = integrate_lindblad(h, DecayModel(400.0), rho0, (0, t_end), [t_end],
                              rtol=1e-9)
    return traj.n_steps


def bench_grid(n=13):
    rng = np.random.default_rng(1)
    u = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    average_fidelity(u, InitialStateGrid(n), swap_gate())
    return n**6


CASES = (
    ("state trajectory (dim 9, 2.12 us)", bench_state),
    ("density segment  (dim 16, 0.5 us)", bench_density),
    ("fidelity grid    (13^6 states)", bench_grid),
)


def _best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(repeat):
    results = {}
    for backend in ("numba", "numpy"):
        set_backend(backend)
        for label, fn in CASES:
            fn()  # warm-up / compile
            results[(backend, label)] = _best_of(fn, repeat)
    width = max(len(label) for label, _ in CASES)
    print(f"{'case':<{width}}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    for label, _ in CASES:
        tb = results[("numba", label)]
        tn = results[("numpy", label)]
        print(f"{label:<{width}}  {tb * 1e3:>8.1f}ms  {tn * 1e3:>8.1f}ms  "
              f"{tn / tb:>7.1f}x")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    run(ap.parse_args().repeat)
