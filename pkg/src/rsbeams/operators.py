r"""Photon wave-mechanics operators in position and momentum space.

Position-space operators act on :class:`~rsbeams.fields.RSField` objects
and return field values at the requested points; derivatives come from the
field's analytic jet when ``fd`` is None, otherwise from finite differences.

Momentum-space angular momentum operators act on amplitudes
:math:`\psi^\pm(\mathbf k)` in one of two phase conventions for the
polarization vector:

``'whittaker'``
    :math:`\hat M_{x,y} = \hbar(-i(\mathbf k\times\partial_{\mathbf k})_{x,y}
    \pm k k_{x,y}/k_\perp^2)`, :math:`\hat M_z = -i\hbar(\mathbf k\times\partial_{\mathbf k})_z`.
``'alternate'``
    :math:`\hat M_{x,y} = \hbar(-i(\mathbf k\times\partial_{\mathbf k})_{x,y}
    \pm k_{x,y}/(k + k_z))`, :math:`\hat M_z = \hbar(-i(\mathbf k\times\partial_{\mathbf k})_z \pm 1)`.
"""

from typing import NamedTuple

import numpy as np

from .errors import DomainError, SingularDirectionError
from .fields import NATURAL, FDSpec, RSField, as_points, curl_from_jacobian, fd_hessian, field_jacobian

__all__ = [
    "Spin1Matrices",
    "spin_matrices",
    "curl_via_spin",
    "apply_pz",
    "apply_pperp2",
    "apply_mz",
    "helicity_residual",
    "conjugate_as_wavefunction",
    "EigenEstimate",
    "eigenvalue_estimate",
    "MomentumAmplitude",
    "GAUGES",
    "momentum_gradient",
    "momentum_mz",
    "momentum_mx_my",
    "momentum_operator",
    "momentum_commutator_xy",
    "momentum_helicity",
]

GAUGES = ("whittaker", "alternate")


class Spin1Matrices(NamedTuple):
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray

    def dot(self, n):
        """``s . n`` for a 3-vector ``n``."""
        return n[0] * self.sx + n[1] * self.sy + n[2] * self.sz


def spin_matrices():
    """Spin-one matrices ``(s_a)_{bc} = -i eps_{abc}``, so that ``-i (s . grad) = curl``."""
    eps = np.zeros((3, 3, 3))
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[a, b, c] = 1.0
        eps[a, c, b] = -1.0
    s = -1j * eps
    s.flags.writeable = False
    return Spin1Matrices(s[0], s[1], s[2])


_SPIN = spin_matrices()


def curl_via_spin(f, points, fd=None):
    """Curl as ``-i (s . grad) F``, contracted directly from the spin matrices."""
    _, jac = field_jacobian(f, points, fd)
    out = 0
    for a, s in enumerate(_SPIN):
        out = out + np.einsum("ij,...j->...i", s, jac[..., :, a])
    return -1j * out


def apply_pz(f, points, consts=NATURAL, fd=None):
    """``-i hbar dF/dz``."""
    _, jac = field_jacobian(f, points, fd)
    return -1j * consts.hbar * jac[..., :, 2]


def _field_hessian(f, pts, fd):
    if fd is None and f.has_jet:
        hess = f.jet(pts)[2]
        if hess is not None:
            return hess
    return fd_hessian(f.func, pts, fd or FDSpec())


def apply_pperp2(f, points, consts=NATURAL, fd=None):
    """``-hbar^2 (d^2/dx^2 + d^2/dy^2) F``."""
    pts = as_points(points)
    h = _field_hessian(f, pts, fd)
    return -(consts.hbar**2) * (h[..., 0, 0] + h[..., 1, 1])


def apply_mz(f, points, consts=NATURAL, fd=None):
    """``-i hbar (x d/dy - y d/dx) F + hbar s_z F``."""
    pts = as_points(points)
    val, jac = field_jacobian(f, pts, fd)
    x, y = pts[..., 0:1], pts[..., 1:2]
    orbital = -1j * (x * jac[..., :, 1] - y * jac[..., :, 0])
    spin = np.einsum("ij,...j->...i", _SPIN.sz, val)
    return consts.hbar * (orbital + spin)


def helicity_residual(f, points, k, sigma, fd=None):
    """``curl F - sigma k F``; vanishes for a helicity-``sigma`` mode of wavenumber ``k``."""
    if not k > 0:
        raise DomainError("wavenumber must be positive")
    val, jac = field_jacobian(f, points, fd)
    return curl_from_jacobian(jac) - sigma * k * val


def conjugate_as_wavefunction(f):
    """Complex conjugate of a negative-frequency mode, the object operators act on.

    The analytic jet, when present, is conjugated along with the values.
    """
    jet = None
    if f.has_jet:

        def jet(p):
            v, j, h = f.jet(p)
            return np.conj(v), np.conj(j), (None if h is None else np.conj(h))

    return RSField(lambda p: np.conj(f.func(p)), jet=jet, meta={**f.meta, "conjugated": True})


class EigenEstimate(NamedTuple):
    rayleigh: complex
    pointwise: np.ndarray
    low_norm: np.ndarray


def eigenvalue_estimate(F, OF, floor=1e-10):
    """Eigenvalue of an operator from samples of ``F`` and ``O F``.

    Returns the Rayleigh quotient ``<F, OF> / <F, F>`` over all samples, the
    per-point ratios ``<F, OF>_p / |F_p|^2`` and a mask of points whose norm
    is below ``floor`` times the largest sampled norm (their ratios are NaN).
    """
    F = np.asarray(F)
    OF = np.asarray(OF)
    num = np.sum(np.conj(F) * OF, axis=-1)
    den = np.sum(np.abs(F) ** 2, axis=-1)
    low = np.sqrt(den) < floor * np.sqrt(np.max(den))
    ratio = np.full(den.shape, np.nan, dtype=complex)
    ratio[~low] = num[~low] / den[~low]
    return EigenEstimate(np.sum(num) / np.sum(den), ratio, low)


class MomentumAmplitude:
    """A smooth function ``psi(k)`` over wave-vector space with a helicity tag.

    ``func`` maps arrays ``(..., 3)`` of wave vectors to complex values.
    """

    def __init__(self, func, helicity=1):
        if helicity not in (1, -1):
            raise DomainError("helicity must be +1 or -1")
        self.func = func
        self.helicity = helicity

    def __call__(self, k):
        return self.func(np.asarray(k, dtype=float))


def _k_steps(fd):
    h = float(np.asarray(fd.h).ravel()[0]) if fd is not None else 1e-4
    return (fd or FDSpec(h=h)).order, h


def momentum_gradient(func, k, fd=None):
    """Central-difference gradient of ``func`` over ``(k_x, k_y, k_z)``; default step 1e-4."""
    k = np.asarray(k, dtype=float)
    order, h = _k_steps(fd)
    if order == 4:
        offs, wts = (-2, -1, 1, 2), (1 / 12, -8 / 12, 8 / 12, -1 / 12)
    else:
        offs, wts = (-1, 1), (-0.5, 0.5)
    grads = []
    for a in range(3):
        e = np.zeros(3)
        e[a] = h
        grads.append(sum(w * func(k + o * e) for o, w in zip(offs, wts)) / h)
    return np.stack(grads, axis=-1)


def _orbital(func, k, fd):
    """``-i (k x d_k) psi`` as three components."""
    g = momentum_gradient(func, k, fd)
    kx, ky, kz = k[..., 0], k[..., 1], k[..., 2]
    return -1j * np.stack(
        [ky * g[..., 2] - kz * g[..., 1], kz * g[..., 0] - kx * g[..., 2], kx * g[..., 1] - ky * g[..., 0]],
        axis=-1,
    )


def _gauge_terms(k, gauge, hel):
    kx, ky, kz = k[..., 0], k[..., 1], k[..., 2]
    kk = np.sqrt(kx * kx + ky * ky + kz * kz)
    if gauge == "whittaker":
        kp2 = kx * kx + ky * ky
        if np.any(kp2 == 0):
            raise SingularDirectionError("Whittaker-gauge M_x, M_y are singular on the k_z axis")
        return hel * kk * kx / kp2, hel * kk * ky / kp2, np.zeros_like(kx)
    if gauge == "alternate":
        den = kk + kz
        if np.any(den == 0):
            raise SingularDirectionError("alternate-gauge M_x, M_y are undefined on the ray k_z = -k")
        return hel * kx / den, hel * ky / den, hel * np.ones_like(kx)
    raise ValueError(f"unknown gauge {gauge!r}; expected one of {GAUGES}")


def _check_gauge(gauge):
    if gauge not in GAUGES:
        raise ValueError(f"unknown gauge {gauge!r}; expected one of {GAUGES}")


def momentum_operator(amp, component, gauge="whittaker", consts=NATURAL, fd=None):
    """``M_component`` applied to ``amp``, returned as a new :class:`MomentumAmplitude`.

    Composing the result with this function again gives nested finite
    differences, which is how commutators are evaluated.
    """
    _check_gauge(gauge)
    idx = {"x": 0, "y": 1, "z": 2}[component]

    def func(k):
        k = np.asarray(k, dtype=float)
        orb = _orbital(amp.func, k, fd)[..., idx]
        if idx == 2 and gauge == "whittaker":
            extra = 0.0
        else:
            extra = _gauge_terms(k, gauge, amp.helicity)[idx]
        return consts.hbar * (orb + extra * amp.func(k))

    return MomentumAmplitude(func, amp.helicity)


def momentum_mz(amp, k, gauge="whittaker", consts=NATURAL, fd=None):
    """``M_z psi`` at wave vectors ``k``."""
    return momentum_operator(amp, "z", gauge, consts, fd)(k)


def momentum_mx_my(amp, k, gauge="whittaker", consts=NATURAL, fd=None):
    """``(M_x psi, M_y psi)`` at wave vectors ``k`` (requires ``k_perp > 0`` in the Whittaker gauge)."""
    return (
        momentum_operator(amp, "x", gauge, consts, fd)(k),
        momentum_operator(amp, "y", gauge, consts, fd)(k),
    )


def momentum_commutator_xy(amp, k, gauge="whittaker", consts=NATURAL, h_inner=1e-5):
    """``([M_x, M_y] - i hbar M_z) psi`` by nested differences.

    The inner operator uses step ``h_inner``; the outer one uses
    ``sqrt(h_inner)`` so the roundoff of the inner difference is not
    amplified by the outer one.

    Returns
    -------
    residual, scale : ndarray
        The commutator residual and ``|hbar M_z psi|`` for normalizing it.
    """
    inner = FDSpec(h=h_inner)
    outer = FDSpec(h=np.sqrt(h_inner))
    mx = momentum_operator(amp, "x", gauge, consts, inner)
    my = momentum_operator(amp, "y", gauge, consts, inner)
    xy = momentum_operator(my, "x", gauge, consts, outer)(k)
    yx = momentum_operator(mx, "y", gauge, consts, outer)(k)
    mz = momentum_operator(amp, "z", gauge, consts, inner)(k)
    return xy - yx - 1j * consts.hbar * mz, np.abs(consts.hbar * mz)


def momentum_helicity(amp, k, gauge="whittaker", consts=NATURAL, fd=None):
    """``(k . M) psi / (hbar k)``; equals ``helicity * psi``."""
    k = np.asarray(k, dtype=float)
    comps = [momentum_operator(amp, c, gauge, consts, fd)(k) for c in "xyz"]
    kk = np.linalg.norm(k, axis=-1)
    return sum(k[..., i] * comps[i] for i in range(3)) / (consts.hbar * kk)
