# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Matsubara-term integrals; same contract as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, exp, expm1, log1p, isinf, isfinite, fmax, fmin

cnp.import_array()

cdef double SPLIT = 2.0
cdef double DELTA_FLOOR = 1e-6
cdef double COTH_CLAMP = 20.0


cdef inline double _coth(double x) noexcept nogil:
    if x > COTH_CLAMP:
        return 1.0
    return 1.0 + 2.0 / expm1(2.0 * x)


cdef inline double _integrand(double z, double y, double ex, double ez, double prod, double root,
                              double ratio, bint semi, double b) noexcept nogil:
    cdef double y2 = y * y, z2 = z * z
    cdef double fz, fx, cz = 1.0, cx = 1.0, rpar, rperp, f
    if isfinite(prod):
        fz = sqrt(y2 + z2 * (ez - 1.0))
        if not semi:
            cz = _coth(fz * ratio)
        rpar = ((prod - 1.0) * y2 - z2 * (ez - 1.0)) / (prod * y2 + fz * fz + 2.0 * root * y * fz * cz)
    else:
        rpar = 1.0
    if isfinite(ex):
        fx = sqrt(y2 + z2 * (ex - 1.0))
        if not semi:
            cx = _coth(fx * ratio)
        rperp = z2 * (ex - 1.0) / (y2 + fx * fx + 2.0 * y * fx * cx)
    else:
        rperp = 1.0 if z > 0 else 0.0
    f = (2.0 * y2 - z2) * rpar + z2 * rperp
    if b != 0.0:
        f = f * (1.0 - b / y)
    return f


def term_integrals(zeta, eps_x, eps_z, double thickness_ratio, double curvature,
                   leg_x, leg_w, lag_x, lag_w):
    cdef const double[::1] zv = np.ascontiguousarray(zeta, dtype=np.float64)
    cdef const double[::1] exv = np.ascontiguousarray(eps_x, dtype=np.float64)
    cdef const double[::1] ezv = np.ascontiguousarray(eps_z, dtype=np.float64)
    cdef const double[::1] gx = np.ascontiguousarray(leg_x, dtype=np.float64)
    cdef const double[::1] gw = np.ascontiguousarray(leg_w, dtype=np.float64)
    cdef const double[::1] lx = np.ascontiguousarray(lag_x, dtype=np.float64)
    cdef const double[::1] lw = np.ascontiguousarray(lag_w, dtype=np.float64)
    cdef Py_ssize_t n = zv.shape[0], ng = gx.shape[0], nl = lx.shape[0], i, j
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double z, ex, ez, prod, root, s, delta, span, u, t, w, acc1, acc2, tail_w
    cdef bint semi = isinf(thickness_ratio)
    tail_w = exp(-SPLIT)
    with nogil:
        for i in range(n):
            z = zv[i]
            ex = exv[i]
            ez = ezv[i]
            prod = ex * ez
            root = sqrt(prod)
            s = z * sqrt(fmax(fmin(ex, ez) - 1.0, 0.0))
            delta = fmax(sqrt(z * z + s * s), DELTA_FLOOR)
            span = log1p(SPLIT / delta)
            acc1 = 0.0
            for j in range(ng):
                u = 0.5 * span * (gx[j] + 1.0)
                t = delta * expm1(u)
                w = 0.5 * span * gw[j] * (t + delta) * exp(-t)
                acc1 = acc1 + w * _integrand(z, z + t, ex, ez, prod, root, thickness_ratio, semi, curvature)
            acc2 = 0.0
            for j in range(nl):
                t = SPLIT + lx[j]
                acc2 = acc2 + tail_w * lw[j] * _integrand(z, z + t, ex, ez, prod, root, thickness_ratio, semi, curvature)
            out[i] = acc1 + acc2
    return out_arr
