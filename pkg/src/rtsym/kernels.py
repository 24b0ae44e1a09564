"""Hot loops of the symmetry certifier.

Every antiunitary operator handled by this package is monomial: a permutation
``perm`` of the Fock basis times a diagonal of unit phases, optionally composed
with complex conjugation. Conjugating a dense matrix by such an operator is an
index shuffle plus a phase, which is what these kernels do.

Each kernel has a numpy implementation (``*_numpy``) and an explicit-loop
implementation compiled with numba (``*_numba``, ``None`` when numba is
missing). The public name is bound to one of them according to
``rtsym._accel.USE_NUMBA``.
"""
import numpy as np

from ._accel import USE_NUMBA, maybe_njit


def reflection_transform_numpy(h, perm, phases, conjugate):
    x = np.conj(h) if conjugate else h
    return phases[:, None] * x[np.ix_(perm, perm)] * np.conj(phases)[None, :]


def reflection_residual_numpy(h, perm, phases, conjugate):
    if h.size == 0:
        return 0.0
    return float(np.max(np.abs(reflection_transform_numpy(h, perm, phases, conjugate) - h)))


def rotation_residual_scan_numpy(h, perm, ntot, thetas):
    """Residual of ``U(theta) conj(h) U(theta)^-1 - h`` for each angle.

    ``U(theta)`` is ``perm`` followed by ``exp(i theta ntot)``.
    """
    x = np.conj(h)[np.ix_(perm, perm)]
    k = (ntot[:, None] - ntot[None, :]).astype(np.float64)
    mask = (x != 0) | (h != 0)
    xs, hs, ks = x[mask], h[mask], k[mask]
    out = np.empty(len(thetas))
    for m, theta in enumerate(thetas):
        if xs.size == 0:
            out[m] = 0.0
        else:
            out[m] = np.max(np.abs(np.exp(1j * theta * ks) * xs - hs))
    return out


def _reflection_transform_loops(h, perm, phases, conjugate):
    n = h.shape[0]
    out = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        pi = perm[i]
        ui = phases[i]
        for j in range(n):
            v = h[pi, perm[j]]
            if conjugate:
                v = v.conjugate()
            out[i, j] = ui * v * phases[j].conjugate()
    return out


def _reflection_residual_loops(h, perm, phases, conjugate):
    n = h.shape[0]
    worst = 0.0
    for i in range(n):
        pi = perm[i]
        ui = phases[i]
        for j in range(n):
            v = h[pi, perm[j]]
            if conjugate:
                v = v.conjugate()
            d = ui * v * phases[j].conjugate() - h[i, j]
            r = d.real * d.real + d.imag * d.imag
            if r > worst:
                worst = r
    return np.sqrt(worst)


def _rotation_residual_scan_loops(h, perm, ntot, thetas):
    n = h.shape[0]
    # gather the entries that can contribute once, then sweep the angles
    count = 0
    for i in range(n):
        for j in range(n):
            if h[i, j] != 0 or h[perm[i], perm[j]] != 0:
                count += 1
    xs = np.empty(count, dtype=np.complex128)
    hs = np.empty(count, dtype=np.complex128)
    ks = np.empty(count, dtype=np.float64)
    c = 0
    for i in range(n):
        for j in range(n):
            if h[i, j] != 0 or h[perm[i], perm[j]] != 0:
                xs[c] = h[perm[i], perm[j]].conjugate()
                hs[c] = h[i, j]
                ks[c] = ntot[i] - ntot[j]
                c += 1
    out = np.zeros(thetas.shape[0])
    for m in range(thetas.shape[0]):
        theta = thetas[m]
        worst = 0.0
        for c in range(count):
            ang = theta * ks[c]
            d = complex(np.cos(ang), np.sin(ang)) * xs[c] - hs[c]
            r = d.real * d.real + d.imag * d.imag
            if r > worst:
                worst = r
        out[m] = np.sqrt(worst)
    return out


reflection_transform_numba = maybe_njit(_reflection_transform_loops)
reflection_residual_numba = maybe_njit(_reflection_residual_loops)
rotation_residual_scan_numba = maybe_njit(_rotation_residual_scan_loops)

if USE_NUMBA:
    reflection_transform = reflection_transform_numba
    reflection_residual = reflection_residual_numba
    rotation_residual_scan = rotation_residual_scan_numba
else:
    reflection_transform = reflection_transform_numpy
    reflection_residual = reflection_residual_numpy
    rotation_residual_scan = rotation_residual_scan_numpy
