"""Compiled versus numpy Matsubara-term kernel.

    python benchmarks/bench_kernels.py [--repeat 5]

Times term_integrals on the term blocks a typical evaluation produces, then a
full semispace free energy with each backend, and checks the two agree.
"""
import argparse
import statistics
import time

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_laguerre

from casipol import _kernels_py, freeenergy, kernels
from casipol.constants import ThermalGeometry
from casipol.materials import build_permittivity, bundled_graphite_tables
from casipol.polarizability import preset

try:
    from casipol import _kernels
except ImportError:  # pragma: no cover
    _kernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled kernel not built; nothing to compare")
        return

    perm = build_permittivity(tables=bundled_graphite_tables())
    g = ThermalGeometry(300, 3.0)
    step = g.zeta_step
    print(f"{'case':<34}{'numpy [ms]':>12}{'cython [ms]':>13}{'speedup':>9}{'max rel diff':>14}")
    for n_terms, nodes, ratio, b in ((1000, 32, np.inf, 0.0), (1000, 64, 5.0, 0.0),
                                     (10000, 32, 5.0, 0.03), (10000, 128, np.inf, 0.03)):
        zeta = step * np.arange(1, n_terms + 1)
        ex, ez = perm(zeta * g.hbar_omega_c)
        quad = (*leggauss(nodes), *roots_laguerre(min(nodes, 128)))
        args_k = (zeta, ex, ez, ratio, b, *quad)
        tp, _, vp = best_of(lambda: _kernels_py.term_integrals(*args_k), args.repeat)
        tc, _, vc = best_of(lambda: _kernels.term_integrals(*args_k), args.repeat)
        diff = float(np.max(np.abs(vc / vp - 1)))
        name = f"{n_terms} terms, {nodes} nodes, {'semi' if np.isinf(ratio) else 'plate'}{', b' if b else ''}"
        print(f"{name:<34}{tp * 1e3:>12.2f}{tc * 1e3:>13.2f}{tp / tc:>9.2f}{diff:>14.1e}")

    particle = preset("hydrogen-atom")
    res = {}
    for backend, fn in (("numpy", _kernels_py.term_integrals), ("cython", _kernels.term_integrals)):
        kernels.term_integrals = fn
        t, _, r = best_of(lambda: freeenergy.free_energy_semispace(g, perm, particle), args.repeat)
        res[backend] = (t, r.value)
    kernels.term_integrals = _kernels.term_integrals
    (tp, vp), (tc, vc) = res["numpy"], res["cython"]
    print(f"{'full semispace F(3 nm, 300 K)':<34}{tp * 1e3:>12.2f}{tc * 1e3:>13.2f}{tp / tc:>9.2f}{abs(vc / vp - 1):>14.1e}")


if __name__ == "__main__":
    main()
