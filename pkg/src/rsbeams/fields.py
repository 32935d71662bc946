"""Spacetime fields: the Whittaker map, Maxwell and d'Alembert residuals, densities.

Points are arrays whose last axis holds ``(x, y, z, t)``; any leading shape
is carried through. Vector field values are complex arrays whose last axis
holds the three Cartesian components.

Derivatives come either from an analytic *jet* attached to a field object
(value, gradient and Hessian) or from central finite differences described
by an :class:`FDSpec`. Passing ``fd=None`` selects the jet when there is one.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.constants
from scipy.integrate import quad_vec

from .errors import FDToleranceError, QuadratureError

__all__ = [
    "Constants",
    "NATURAL",
    "SI",
    "SpacetimePoint",
    "FDSpec",
    "ScalarWaveField",
    "RSField",
    "QuadResult",
    "as_points",
    "cylindrical_points",
    "fd_gradient",
    "fd_hessian",
    "field_jacobian",
    "curl_from_jacobian",
    "whittaker_from_derivatives",
    "whittaker_map",
    "whittaker_field",
    "maxwell_residual",
    "relative_maxwell_residual",
    "dalembert_residual",
    "relative_dalembert_residual",
    "energy_density",
    "momentum_density",
    "angular_momentum_density",
    "rs_from_eb",
    "eb_from_rs",
    "transverse_integral",
]


@dataclass(frozen=True)
class Constants:
    """Speed of light, reduced Planck constant and vacuum permittivity."""

    c: float = 1.0
    hbar: float = 1.0
    eps0: float = 1.0
    name: str = "natural"

    def __post_init__(self):
        for key in ("c", "hbar", "eps0"):
            val = getattr(self, key)
            if not (np.isfinite(val) and val > 0):
                raise ValueError(f"{key} must be finite and positive, got {val!r}")


NATURAL = Constants()
SI = Constants(
    c=scipy.constants.c,
    hbar=scipy.constants.hbar,
    eps0=scipy.constants.epsilon_0,
    name="si",
)


class SpacetimePoint(NamedTuple):
    x: float
    y: float
    z: float
    t: float


def as_points(points):
    """Validate and return ``points`` as a float array with last axis of length 4."""
    pts = np.asarray(points, dtype=float)
    if pts.shape[-1:] != (4,):
        raise ValueError(f"points need a trailing axis of length 4, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("spacetime points must be finite")
    return pts


def cylindrical_points(rho, phi, z, t):
    """Broadcast cylindrical coordinates into a Cartesian ``(..., 4)`` point array."""
    rho, phi, z, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (rho, phi, z, t)))
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z, t], axis=-1)


@dataclass(frozen=True)
class FDSpec:
    """Central finite-difference stencil: per-coordinate step and order (2 or 4)."""

    h: object = 1e-3
    order: int = 4

    def __post_init__(self):
        if self.order not in (2, 4):
            raise ValueError(f"stencil order must be 2 or 4, got {self.order}")
        if np.any(self.steps <= 0) or not np.all(np.isfinite(self.steps)):
            raise ValueError("finite-difference steps must be positive")

    @property
    def steps(self):
        return np.broadcast_to(np.asarray(self.h, dtype=float), (4,)).copy()

    @classmethod
    def for_wavenumber(cls, k, c=1.0, rel=1e-3, order=4):
        """Steps of ``rel / k`` in space and ``rel / (c k)`` in time."""
        hs = rel / k
        return cls(h=(hs, hs, hs, hs / c), order=order)


# offsets, integer weights and common denominator of the central stencils;
# integer weights make the stencil of a constant exactly zero
_D1 = {
    2: (np.array([-1, 1]), np.array([-1.0, 1.0]), 2.0),
    4: (np.array([-2, -1, 1, 2]), np.array([1.0, -8.0, 8.0, -1.0]), 12.0),
}
_D2 = {
    2: (np.array([-1, 0, 1]), np.array([1.0, -2.0, 1.0]), 1.0),
    4: (np.array([-2, -1, 0, 1, 2]), np.array([-1.0, 16.0, -30.0, 16.0, -1.0]), 12.0),
}


def _check_steps(pts, steps):
    scale = np.max(np.abs(pts.reshape(-1, 4)), axis=0)
    if np.any(steps < 1e3 * np.finfo(float).eps * scale):
        raise FDToleranceError(
            f"finite-difference steps {steps} underflow against coordinates of size {scale}"
        )


def _shifted(pts, shifts):
    """Stack copies of ``pts`` displaced by each row of ``shifts``."""
    return pts[None, ...] + shifts.reshape((len(shifts),) + (1,) * (pts.ndim - 1) + (4,))


def fd_gradient(func, points, fd):
    """Gradient of ``func`` over (x, y, z, t); result gains a trailing axis of 4."""
    pts = as_points(points)
    steps = fd.steps
    _check_steps(pts, steps)
    offs, wts, den = _D1[fd.order]
    shifts = []
    for mu in range(4):
        for o in offs:
            s = np.zeros(4)
            s[mu] = o * steps[mu]
            shifts.append(s)
    vals = np.asarray(func(_shifted(pts, np.array(shifts))))
    vals = vals.reshape((4, len(offs)) + vals.shape[1:])
    grad = np.tensordot(wts, vals, axes=([0], [1]))  # (4, ...)
    grad = grad / (den * steps.reshape((4,) + (1,) * (grad.ndim - 1)))
    return np.moveaxis(grad, 0, -1)


def fd_hessian(func, points, fd):
    """Second derivatives of ``func``; result gains two trailing axes of 4."""
    pts = as_points(points)
    steps = fd.steps
    _check_steps(pts, steps)
    o1, w1, d1 = _D1[fd.order]
    o2, w2, d2 = _D2[fd.order]
    shifts, weights, slots = [], [], []
    for mu in range(4):
        for o, w in zip(o2, w2):
            s = np.zeros(4)
            s[mu] = o * steps[mu]
            shifts.append(s)
            weights.append(w)
            slots.append((mu, mu))
    for mu in range(4):
        for nu in range(mu + 1, 4):
            for oa, wa in zip(o1, w1):
                for ob, wb in zip(o1, w1):
                    s = np.zeros(4)
                    s[mu] = oa * steps[mu]
                    s[nu] = ob * steps[nu]
                    shifts.append(s)
                    weights.append(wa * wb)
                    slots.append((mu, nu))
    vals = np.asarray(func(_shifted(pts, np.array(shifts))))
    out = np.zeros(vals.shape[1:] + (4, 4), dtype=vals.dtype)
    for val, w, (mu, nu) in zip(vals, weights, slots):
        out[..., mu, nu] += w * val
    for mu in range(4):
        for nu in range(mu, 4):
            scale = d2 * steps[mu] ** 2 if mu == nu else d1 * d1 * steps[mu] * steps[nu]
            out[..., mu, nu] /= scale
            out[..., nu, mu] = out[..., mu, nu]
    return out


class ScalarWaveField:
    """A complex scalar solution candidate ``chi(x, y, z, t)``.

    Parameters
    ----------
    func : callable
        Maps points ``(..., 4)`` to complex values ``(...)``.
    jet : callable, optional
        Maps points to ``(value, grad, hess)`` with shapes ``(...)``,
        ``(..., 4)`` and ``(..., 4, 4)``.
    meta : dict, optional
        Free-form description (beam family, quantum numbers).
    """

    def __init__(self, func, jet=None, meta=None):
        self.func = func
        self._jet = jet
        self.meta = dict(meta or {})

    def __call__(self, points):
        return self.func(as_points(points))

    @property
    def has_jet(self):
        return self._jet is not None

    def jet(self, points):
        if self._jet is None:
            raise AttributeError("this field carries no analytic derivatives")
        return self._jet(as_points(points))

    def __repr__(self):
        return f"ScalarWaveField({self.meta})"


class RSField:
    """A complex vector field ``F(x, y, z, t)``.

    ``jet``, when given, returns ``(value, jacobian, hessian)`` with shapes
    ``(..., 3)``, ``(..., 3, 4)`` and ``(..., 3, 4, 4)``; the Hessian slot may
    be ``None``.
    """

    def __init__(self, func, jet=None, meta=None):
        self.func = func
        self._jet = jet
        self.meta = dict(meta or {})

    def __call__(self, points):
        return self.func(as_points(points))

    @property
    def has_jet(self):
        return self._jet is not None

    def jet(self, points):
        if self._jet is None:
            raise AttributeError("this field carries no analytic derivatives")
        return self._jet(as_points(points))

    def map(self, fn, **meta):
        """New field with ``fn`` applied to the values (no jet carried over)."""
        return RSField(lambda p: fn(self.func(p)), meta={**self.meta, **meta})

    def __repr__(self):
        return f"RSField({self.meta})"


def _check_finite(vals, what):
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError(f"non-finite {what} samples")
    return vals


def field_jacobian(f, points, fd=None):
    """Value and Jacobian ``dF_i/dx_mu`` of an :class:`RSField`."""
    pts = as_points(points)
    if fd is None and f.has_jet:
        val, jac, _ = f.jet(pts)
        return val, jac
    fd = fd or FDSpec()
    val = _check_finite(f(pts), "field")
    jac = _check_finite(fd_gradient(f.func, pts, fd), "field")
    return val, jac


def curl_from_jacobian(jac):
    return np.stack(
        [
            jac[..., 2, 1] - jac[..., 1, 2],
            jac[..., 0, 2] - jac[..., 2, 0],
            jac[..., 1, 0] - jac[..., 0, 1],
        ],
        axis=-1,
    )


def whittaker_from_derivatives(hess, c=1.0):
    """RS vector from the second derivatives of the scalar ``chi``."""
    h = hess
    fx = h[..., 0, 2] + (1j / c) * h[..., 1, 3]
    fy = h[..., 1, 2] - (1j / c) * h[..., 0, 3]
    fz = -(h[..., 0, 0] + h[..., 1, 1])
    return np.stack([fx, fy, fz], axis=-1)


def _chi_hessian(chi, pts, fd):
    if fd is None and chi.has_jet:
        return chi.jet(pts)[2]
    fd = fd or FDSpec()
    return _check_finite(fd_hessian(chi.func, pts, fd), "scalar")


def whittaker_map(chi, points, consts=NATURAL, fd=None):
    """RS vector generated by a scalar wave ``chi`` through a z-directed Hertz potential.

    Uses the analytic jet of ``chi`` when ``fd`` is None and one exists,
    otherwise finite differences.
    """
    pts = as_points(points)
    return whittaker_from_derivatives(_chi_hessian(chi, pts, fd), consts.c)


def whittaker_field(chi, consts=NATURAL, fd=None):
    """Wrap :func:`whittaker_map` of ``chi`` as an :class:`RSField`."""
    return RSField(
        lambda p: whittaker_map(chi, p, consts, fd),
        meta={**chi.meta, "construction": "whittaker"},
    )


def maxwell_residual(f, points, consts=NATURAL, fd=None):
    """Residuals of ``dF/dt = -i c curl F`` and ``div F = 0``.

    Returns
    -------
    curl_residual : ndarray, shape (..., 3)
        ``dF/dt + i c curl F``.
    div_residual : ndarray, shape (...)
    """
    _, jac = field_jacobian(f, points, fd)
    curl = curl_from_jacobian(jac)
    curl_res = jac[..., :, 3] + 1j * consts.c * curl
    div_res = jac[..., 0, 0] + jac[..., 1, 1] + jac[..., 2, 2]
    return curl_res, div_res


def relative_maxwell_residual(f, points, consts=NATURAL, fd=None):
    """Residuals of :func:`maxwell_residual` scaled by the size of the cancelling terms.

    The curl residual is divided by ``max(|dF/dt|, c |curl F|)`` and the
    divergence by the Frobenius norm of the spatial Jacobian; the larger of
    the two ratios is returned per point.
    """
    _, jac = field_jacobian(f, points, fd)
    curl = curl_from_jacobian(jac)
    dt = jac[..., :, 3]
    curl_res = dt + 1j * consts.c * curl
    div_res = jac[..., 0, 0] + jac[..., 1, 1] + jac[..., 2, 2]
    tiny = np.finfo(float).tiny
    s_curl = np.maximum(np.linalg.norm(dt, axis=-1), consts.c * np.linalg.norm(curl, axis=-1))
    s_div = np.linalg.norm(jac[..., :3].reshape(jac.shape[:-2] + (9,)), axis=-1)
    r_curl = np.linalg.norm(curl_res, axis=-1) / np.maximum(s_curl, tiny)
    r_div = np.abs(div_res) / np.maximum(s_div, tiny)
    return np.maximum(r_curl, r_div)


def dalembert_residual(chi, points, consts=NATURAL, fd=None):
    """``(1/c^2) d^2chi/dt^2 - Laplacian chi``."""
    pts = as_points(points)
    h = _chi_hessian(chi, pts, fd)
    return h[..., 3, 3] / consts.c**2 - (h[..., 0, 0] + h[..., 1, 1] + h[..., 2, 2])


def relative_dalembert_residual(chi, points, consts=NATURAL, fd=None):
    """d'Alembert residual divided by the sum of magnitudes of its four terms."""
    pts = as_points(points)
    h = _chi_hessian(chi, pts, fd)
    res = h[..., 3, 3] / consts.c**2 - (h[..., 0, 0] + h[..., 1, 1] + h[..., 2, 2])
    scale = np.abs(h[..., 3, 3]) / consts.c**2 + sum(np.abs(h[..., i, i]) for i in range(3))
    return np.abs(res) / np.maximum(scale, np.finfo(float).tiny)


def energy_density(F):
    """``F* . F`` (real, non-negative)."""
    F = np.asarray(F)
    return np.sum(F.real**2 + F.imag**2, axis=-1)


def momentum_density(F, consts=NATURAL):
    """``(-i/c) F* x F``; evaluated as ``Im(F* x F) / c`` so the result is exactly real."""
    F = np.asarray(F, dtype=complex)
    return np.imag(np.cross(np.conj(F), F)) / consts.c


def angular_momentum_density(F, r, consts=NATURAL):
    """``r x momentum_density(F)``; ``r`` broadcasts against ``F``."""
    return np.cross(np.asarray(r, dtype=float), momentum_density(F, consts))


def rs_from_eb(E, B, consts=NATURAL):
    """``sqrt(eps0 / 2) (E + i c B)``."""
    return np.sqrt(consts.eps0 / 2) * (np.asarray(E) + 1j * consts.c * np.asarray(B))


def eb_from_rs(F, consts=NATURAL):
    """Inverse of :func:`rs_from_eb`; returns ``(E, B)``."""
    F = np.asarray(F) / np.sqrt(consts.eps0 / 2)
    return F.real, F.imag / consts.c


class QuadResult(NamedTuple):
    value: object
    error: float


def _periodic_mean(g, rtol, atol, n0=16, nmax=8192):
    """Mean of a smooth 2*pi-periodic function by trapezoid doubling.

    ``g`` maps an array of angles to values with the angle on axis 0. The
    stopping test uses the largest magnitude in the result, since the node
    count needed does not depend on the size of individual entries. When
    the mean is much smaller than the integrand (strong cancellation) the
    target is floored at the roundoff level of the samples.
    """
    n = n0
    ang = 2 * np.pi * np.arange(n) / n
    vals = g(ang)
    prev = np.mean(vals, axis=0)
    floor = 64 * np.finfo(float).eps * np.max(np.mean(np.abs(vals), axis=0), initial=0.0)
    while n < nmax:
        # new nodes interleave the old ones
        mid = ang + np.pi / n
        cur = 0.5 * (prev + np.mean(g(mid), axis=0))
        n *= 2
        ang = 2 * np.pi * np.arange(n) / n
        diff = np.max(np.abs(cur - prev), initial=0.0)
        if diff <= max(atol, floor, rtol * np.max(np.abs(cur), initial=0.0)):
            return cur, float(diff)
        prev = cur
    raise QuadratureError("azimuthal quadrature did not converge", estimate=prev)


def transverse_integral(density, z, t, radius, rtol=1e-10, atol=0.0, limit=400):
    r"""Integrate ``density`` over the disc ``rho <= radius`` at fixed ``z`` and ``t``.

    Computes :math:`\int_0^R d\rho\,\rho \int_0^{2\pi} d\phi\;
    \mathrm{density}(\rho, \phi, z, t)` with adaptive Gauss-Kronrod in
    :math:`\rho` (``scipy.integrate.quad_vec``) around a trapezoid-doubling
    rule in :math:`\phi`, which converges geometrically for smooth periodic
    integrands. ``density`` receives broadcastable arrays ``(rho, phi, z, t)``
    with the angle on axis 0 and may return scalars or 3-vectors per point.

    Bessel-family densities decay only like ``1/rho``; the caller must pick
    ``radius`` explicitly.

    Returns
    -------
    QuadResult
        ``value`` and an absolute error estimate.

    Raises
    ------
    QuadratureError
        If either level fails to converge; ``estimate`` holds the best value.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    inner_tol = 0.1 * rtol

    def radial(rho):
        mean, _ = _periodic_mean(
            lambda ang: np.asarray(density(rho, ang, z, t), dtype=float),
            inner_tol,
            0.1 * atol,
        )
        return 2 * np.pi * rho * mean

    res, err, info = quad_vec(
        radial, 0.0, float(radius), epsabs=max(atol, np.finfo(float).tiny), epsrel=rtol, limit=limit, full_output=True
    )
    if not info.success:
        raise QuadratureError(
            f"radial quadrature did not converge ({info.message})", estimate=res, error=err
        )
    return QuadResult(res, float(err))
