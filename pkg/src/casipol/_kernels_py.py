"""Pure numpy implementation of the Matsubara-term integrals.

Mirrors ``_kernels.pyx`` operation for operation; used when the compiled
extension is unavailable or disabled.
"""
import numpy as np

SPLIT = 2.0
DELTA_FLOOR = 1e-6
COTH_CLAMP = 20.0


def _coth(x):
    xc = np.minimum(x, COTH_CLAMP)
    return np.where(x > COTH_CLAMP, 1.0, 1.0 + 2.0 / np.expm1(2.0 * xc))


def term_integrals(zeta, eps_x, eps_z, thickness_ratio, curvature, leg_x, leg_w, lag_x, lag_w):
    """int_0^inf e^{-t} (1 - b/y) [(2y^2 - z^2) r_par + z^2 r_perp] dt with y = z + t.

    One value per entry of ``zeta``; the e^{-zeta} factor is left to the caller.
    ``thickness_ratio`` is d/(2a) (inf for a semispace); ``curvature`` is the
    cylinder parameter a/(2(R+a)), zero for a plate.
    """
    zeta = np.asarray(zeta, dtype=float)[:, None]
    ex = np.asarray(eps_x, dtype=float)[:, None]
    ez = np.asarray(eps_z, dtype=float)[:, None]

    emin = np.minimum(ex, ez)
    s = zeta * np.sqrt(np.maximum(emin - 1.0, 0.0))
    delta = np.maximum(np.sqrt(zeta * zeta + s * s), DELTA_FLOOR)
    span = np.log1p(SPLIT / delta)
    u = 0.5 * span * (leg_x[None, :] + 1.0)
    t1 = delta * np.expm1(u)
    w1 = 0.5 * span * leg_w[None, :] * (t1 + delta) * np.exp(-t1)
    t2 = np.broadcast_to(SPLIT + lag_x[None, :], (zeta.shape[0], lag_x.size))
    w2 = np.broadcast_to(np.exp(-SPLIT) * lag_w[None, :], t2.shape)
    t = np.concatenate([t1, t2], axis=1)
    w = np.concatenate([w1, w2], axis=1)

    y = zeta + t
    y2 = y * y
    z2 = zeta * zeta
    prod = ex * ez
    finite_z = np.isfinite(prod)
    finite_x = np.isfinite(ex)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        fz = np.sqrt(y2 + z2 * (ez - 1.0))
        fx = np.sqrt(y2 + z2 * (ex - 1.0))
        semi = np.isinf(thickness_ratio)
        cz = 1.0 if semi else _coth(fz * thickness_ratio)
        cx = 1.0 if semi else _coth(fx * thickness_ratio)
        root = np.sqrt(prod)
        rpar = ((prod - 1.0) * y2 - z2 * (ez - 1.0)) / (prod * y2 + fz * fz + 2.0 * root * y * fz * cz)
        rperp = z2 * (ex - 1.0) / (y2 + fx * fx + 2.0 * y * fx * cx)
    rpar = np.where(finite_z, rpar, 1.0)
    rperp = np.where(finite_x, rperp, np.where(zeta > 0, 1.0, 0.0))
    f = (2.0 * y2 - z2) * rpar + z2 * rperp
    if curvature != 0.0:
        f = f * (1.0 - curvature / y)
    return (f * w).sum(axis=1)
