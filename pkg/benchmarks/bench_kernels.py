"""Compare the numba and numpy symmetry kernels.

    python3 benchmarks/bench_kernels.py [--cutoffs 8 12 20] [--repeat 5]

Each kernel is called once before timing so JIT compilation is excluded.
"""
import argparse
import timeit

import numpy as np

from rtsym import _accel, kernels
from rtsym.fock import FockSpace
from rtsym.hamiltonians import build_h3
from rtsym.symmetry import exchange_permutation, rt_spec


def _cases(cutoff):
    space = FockSpace(2, cutoff)
    h = build_h3(space, 0.3, 1.0, 0.2, 0.4, 0.6).matrix
    spec = rt_spec(space, -0.8)
    perm = exchange_permutation(space)
    ntot = np.ascontiguousarray(space.total_number)
    thetas = np.linspace(-np.pi, np.pi, 720)
    return {
        "reflection_residual": (
            (h, spec.perm, spec.phases, True),
            kernels.reflection_residual_numpy,
            kernels.reflection_residual_numba,
        ),
        "reflection_transform": (
            (h, spec.perm, spec.phases, True),
            kernels.reflection_transform_numpy,
            kernels.reflection_transform_numba,
        ),
        "rotation_residual_scan": (
            (h, perm, ntot, thetas),
            kernels.rotation_residual_scan_numpy,
            kernels.rotation_residual_scan_numba,
        ),
    }


def _best(func, args, repeat):
    func(*args)
    number = 5
    return min(timeit.repeat(lambda: func(*args), number=number, repeat=repeat)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cutoffs", type=int, nargs="+", default=[8, 12, 20])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if not _accel.NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'kernel':<24}{'cutoff':>7}{'numpy [ms]':>13}{'numba [ms]':>13}{'speedup':>9}")
    for cutoff in args.cutoffs:
        for name, (fargs, f_np, f_nb) in _cases(cutoff).items():
            a, b = f_np(*fargs), f_nb(*fargs)
            assert np.allclose(a, b, atol=1e-12), name
            t_np, t_nb = _best(f_np, fargs, args.repeat), _best(f_nb, fargs, args.repeat)
            print(f"{name:<24}{cutoff:>7}{1e3 * t_np:>13.3f}{1e3 * t_nb:>13.3f}{t_np / t_nb:>9.1f}")


if __name__ == "__main__":
    main()
