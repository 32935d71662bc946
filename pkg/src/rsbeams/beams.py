r"""Closed-form beams: polarization vector, Bessel beams, near-axis limit, exact LG beams.

All scalar beams here factor as

.. math:: \chi = W(x, y)\,K(s, z, t), \qquad W = (x \pm i y)^q,\; s = x^2 + y^2,

which gives value, gradient and Hessian in closed form through the chain
rule. The RS field of a Bessel beam is a sum of five terms of the same
shape, so its Jacobian and Hessian are analytic as well.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, OnAxisBasisError, SingularDirectionError
from .fields import NATURAL, RSField, ScalarWaveField, as_points, whittaker_from_derivatives
from .specfun import bessel_j, bessel_j_prime, bessel_j_scaled, laguerre, laguerre_complex

__all__ = [
    "BesselBeamSpec",
    "LGBeamSpec",
    "polarization_vector",
    "k_plus_minus",
    "bessel_chi",
    "bessel_chi_field",
    "bessel_rs_field",
    "bessel_field",
    "bessel_near_axis_chi",
    "near_axis_chi_field",
    "lg_chi",
    "lg_chi_field",
    "lg_rs_field",
    "lg_field",
    "lg_modulation_time",
    "laguerre_integral_closed_form",
    "laguerre_integral_quadrature",
    "plane_wave_bessel_expansion",
]


def _check_sigma(sigma):
    if sigma not in (1, -1):
        raise DomainError(f"sigma must be +1 or -1, got {sigma!r}")


def _check_int(name, v):
    if int(v) != v:
        raise DomainError(f"{name} must be an integer, got {v!r}")


@dataclass(frozen=True)
class BesselBeamSpec:
    """Bessel beam labelled by transverse/axial wavenumbers, azimuthal index and helicity."""

    k_perp: float
    k_z: float
    m: int = 0
    sigma: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.k_perp) and self.k_perp > 0):
            raise DomainError(f"k_perp must be positive, got {self.k_perp!r}")
        if not np.isfinite(self.k_z):
            raise DomainError("k_z must be finite")
        _check_int("m", self.m)
        _check_sigma(self.sigma)

    @property
    def k(self):
        return math.hypot(self.k_perp, self.k_z)

    def omega(self, consts=NATURAL):
        return consts.c * self.k

    @property
    def k_plus(self):
        return k_plus_minus(self.sigma, self.k, self.k_z)[0]

    @property
    def k_minus(self):
        return k_plus_minus(self.sigma, self.k, self.k_z)[1]


@dataclass(frozen=True)
class LGBeamSpec:
    """Exact Laguerre-Gauss beam: carrier ``Omega``, indices ``n, m >= 0``, waist ``l``."""

    Omega: float
    n: int = 0
    m: int = 0
    l: float = 1.0  # noqa: E741
    sigma: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.Omega) and self.Omega > 0):
            raise DomainError(f"Omega must be positive, got {self.Omega!r}")
        if not (np.isfinite(self.l) and self.l > 0):
            raise DomainError(f"waist l must be positive, got {self.l!r}")
        _check_int("n", self.n)
        _check_int("m", self.m)
        if self.n < 0 or self.m < 0:
            raise DomainError("LG indices n and m must be non-negative")
        _check_sigma(self.sigma)

    @property
    def s(self):
        """Exponent ``n + m/2`` of the ``k_-`` weight."""
        return self.n + 0.5 * self.m

    def prefactor(self, consts=NATURAL):
        """``n! (c / Omega)^(n + m/2 + 1)``."""
        return math.factorial(self.n) * (consts.c / self.Omega) ** (self.s + 1)

    def a(self, t_plus, consts=NATURAL):
        """Complex width parameter ``l^2 + i sigma c^2 t_+ / Omega``."""
        return self.l**2 + 1j * self.sigma * consts.c**2 * np.asarray(t_plus) / self.Omega


def k_plus_minus(sigma, k, k_z):
    """``k_(+/-)(sigma) = (sigma k +/- k_z) / 2``."""
    return 0.5 * (sigma * k + k_z), 0.5 * (sigma * k - k_z)


def lg_modulation_time(Omega, l, c=1.0):  # noqa: E741
    """Characteristic time ``l^2 Omega / c^2`` of the slow ``t_+`` modulation."""
    return l**2 * Omega / c**2


def polarization_vector(k):
    """Unit polarization vector solving ``n x e = -i e`` in the Whittaker phase convention.

    Parameters
    ----------
    k : array_like, shape (..., 3)
        Wave vectors with non-zero transverse part.

    Raises
    ------
    SingularDirectionError
        If any ``k`` is parallel to the z axis.
    """
    k = np.asarray(k, dtype=float)
    kx, ky, kz = k[..., 0], k[..., 1], k[..., 2]
    kp2 = kx * kx + ky * ky
    if np.any(kp2 == 0):
        raise SingularDirectionError("polarization vector is singular for k along the z axis")
    kk = np.sqrt(kp2 + kz * kz)
    norm = 1.0 / (np.sqrt(2.0) * kk * np.sqrt(kp2))
    return norm[..., None] * np.stack(
        [-kx * kz + 1j * kk * ky, -ky * kz - 1j * kk * kx, kp2 + 0j], axis=-1
    )


def _cyl(pts):
    x, y = pts[..., 0], pts[..., 1]
    # arctan2(0, 0) == 0 fixes phi := 0 on the axis
    return np.hypot(x, y), np.arctan2(y, x)


def _wpow(w, p):
    if p < 0:
        return np.zeros_like(w)
    return w**p


def _separable_jet(q, eps, K, x, y):
    """Value, gradient and Hessian of ``(x + i eps y)^q * K(x^2 + y^2, z, t)``.

    ``K`` is a dict of the partial derivatives of ``K`` keyed by
    ``'0', 's', 'z', 't', 'ss', 'sz', 'st', 'zz', 'zt', 'tt'``.
    """
    w = x + 1j * eps * y
    W = _wpow(w, q)
    w1 = q * _wpow(w, q - 1)
    w2 = q * (q - 1) * _wpow(w, q - 2)
    Wx, Wy = w1, 1j * eps * w1
    Wxx, Wxy, Wyy = w2, 1j * eps * w2, -w2

    k0, ks, kss = K["0"], K["s"], K["ss"]
    val = W * k0
    g = np.empty(val.shape + (4,), dtype=complex)
    g[..., 0] = Wx * k0 + W * ks * 2 * x
    g[..., 1] = Wy * k0 + W * ks * 2 * y
    g[..., 2] = W * K["z"]
    g[..., 3] = W * K["t"]

    h = np.empty(val.shape + (4, 4), dtype=complex)
    h[..., 0, 0] = Wxx * k0 + 4 * x * Wx * ks + W * (4 * x * x * kss + 2 * ks)
    h[..., 1, 1] = Wyy * k0 + 4 * y * Wy * ks + W * (4 * y * y * kss + 2 * ks)
    h[..., 0, 1] = Wxy * k0 + 2 * y * Wx * ks + 2 * x * Wy * ks + 4 * x * y * W * kss
    h[..., 0, 2] = Wx * K["z"] + 2 * x * W * K["sz"]
    h[..., 0, 3] = Wx * K["t"] + 2 * x * W * K["st"]
    h[..., 1, 2] = Wy * K["z"] + 2 * y * W * K["sz"]
    h[..., 1, 3] = Wy * K["t"] + 2 * y * W * K["st"]
    h[..., 2, 2] = W * K["zz"]
    h[..., 2, 3] = W * K["zt"]
    h[..., 3, 3] = W * K["tt"]
    for a, b in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
        h[..., b, a] = h[..., a, b]
    return val, g, h


def _plane_factor_derivs(Z, kappa, nu, R, Rs, Rss, coef):
    """Derivative dict for ``K = coef R(s) Z`` with ``Z = exp(i (kappa z - nu t))``."""
    c = coef * Z
    return {
        "0": c * R,
        "s": c * Rs,
        "ss": c * Rss,
        "z": 1j * kappa * c * R,
        "t": -1j * nu * c * R,
        "sz": 1j * kappa * c * Rs,
        "st": -1j * nu * c * Rs,
        "zz": -(kappa**2) * c * R,
        "zt": kappa * nu * c * R,
        "tt": -(nu**2) * c * R,
    }


@dataclass(frozen=True)
class _CylindricalTerm:
    """``coef * exp(i mu phi) J_p(k_perp rho) exp(i (kappa z - nu t))`` with ``|mu| = |p|``."""

    coef: complex
    mu: int
    p: int
    k_perp: float
    kappa: float
    nu: float

    def value(self, pts):
        rho, phi = _cyl(pts)
        z, t = pts[..., 2], pts[..., 3]
        return (
            self.coef
            * np.exp(1j * (self.mu * phi + self.kappa * z - self.nu * t))
            * bessel_j(self.p, self.k_perp * rho)
        )

    def jet(self, pts):
        x, y, z, t = (pts[..., i] for i in range(4))
        q = abs(self.p)
        eps = 1 if self.mu >= 0 else -1
        sign = -1.0 if (self.p < 0 and q % 2) else 1.0
        kp = self.k_perp
        xi = kp * np.hypot(x, y)
        R = kp**q * bessel_j_scaled(q, xi)
        Rs = -0.5 * kp * kp ** (q + 1) * bessel_j_scaled(q + 1, xi)
        Rss = 0.25 * kp**2 * kp ** (q + 2) * bessel_j_scaled(q + 2, xi)
        Z = np.exp(1j * (self.kappa * z - self.nu * t))
        K = _plane_factor_derivs(Z, self.kappa, self.nu, R, Rs, Rss, sign * self.coef)
        return _separable_jet(q, eps, K, x, y)


def _bessel_scalar_term(spec, consts):
    k, sig, m = spec.k, spec.sigma, spec.m
    coef = (1j * sig) ** m / (math.sqrt(2.0) * k * spec.k_perp)
    return _CylindricalTerm(coef, sig * m, m, spec.k_perp, sig * spec.k_z, sig * consts.c * k)


def _bessel_field_terms(spec, consts):
    """Cartesian components of the Bessel RS field as lists of cylindrical terms."""
    k, sig, m = spec.k, spec.sigma, spec.m
    kp, km = spec.k_plus, spec.k_minus
    pref = (1j * sig) ** m / (math.sqrt(2.0) * k)
    args = (spec.k_perp, sig * spec.k_z, sig * consts.c * k)
    up = (sig * (m + 1), m + 1)
    dn = (sig * (m - 1), m - 1)
    return [
        [_CylindricalTerm(pref * 1j * sig * km, *up, *args),
         _CylindricalTerm(pref * 1j * sig * kp, *dn, *args)],
        [_CylindricalTerm(pref * km, *up, *args),
         _CylindricalTerm(-pref * kp, *dn, *args)],
        [_CylindricalTerm(pref * spec.k_perp, sig * m, m, *args)],
    ]


def bessel_chi(spec, points, consts=NATURAL):
    r"""Scalar Bessel mode
    :math:`\frac{(i\sigma)^m}{\sqrt2 k k_\perp} e^{-i\sigma(\omega t - k_z z - m\phi)} J_m(k_\perp\rho)`.
    """
    return _bessel_scalar_term(spec, consts).value(as_points(points))


def bessel_chi_field(spec, consts=NATURAL):
    """:func:`bessel_chi` as a :class:`ScalarWaveField` with analytic derivatives."""
    term = _bessel_scalar_term(spec, consts)
    return ScalarWaveField(
        term.value, jet=term.jet, meta={"family": "bessel", "spec": spec, "constants": consts.name}
    )


def bessel_rs_field(spec, points, consts=NATURAL, basis="cartesian"):
    """Closed-form RS vector of a Bessel beam.

    ``basis='cylindrical'`` returns ``(F_rho, F_phi, F_z)``, which needs
    ``rho > 0``.

    Raises
    ------
    OnAxisBasisError
        Cylindrical components requested at a point on the z axis.
    """
    pts = as_points(points)
    if basis == "cartesian":
        return np.stack(
            [sum(t.value(pts) for t in comp) for comp in _bessel_field_terms(spec, consts)],
            axis=-1,
        )
    if basis != "cylindrical":
        raise ValueError(f"unknown basis {basis!r}")
    rho, phi = _cyl(pts)
    if np.any(rho == 0):
        raise OnAxisBasisError("cylindrical components are undefined on the axis")
    k, sig, m, kz = spec.k, spec.sigma, spec.m, spec.k_z
    xi = spec.k_perp * rho
    z, t = pts[..., 2], pts[..., 3]
    pref = (1j * sig) ** m / (math.sqrt(2.0) * k) * np.exp(
        -1j * sig * (consts.c * k * t - kz * z - m * phi)
    )
    J = bessel_j(m, xi)
    dJ = bessel_j_prime(m, xi)
    return np.stack(
        [
            pref * (1j * sig * kz * dJ + 1j * k * m * J / xi),
            pref * (-sig * k * dJ - kz * m * J / xi),
            pref * spec.k_perp * J,
        ],
        axis=-1,
    )


def bessel_field(spec, consts=NATURAL):
    """Cartesian Bessel RS field as an :class:`RSField` with analytic Jacobian and Hessian."""
    comps = _bessel_field_terms(spec, consts)

    def func(pts):
        return np.stack([sum(t.value(pts) for t in comp) for comp in comps], axis=-1)

    def jet(pts):
        vals, jacs, hesses = [], [], []
        for comp in comps:
            parts = [t.jet(pts) for t in comp]
            vals.append(sum(p[0] for p in parts))
            jacs.append(sum(p[1] for p in parts))
            hesses.append(sum(p[2] for p in parts))
        return np.stack(vals, -1), np.stack(jacs, -2), np.stack(hesses, -3)

    return RSField(func, jet=jet, meta={"family": "bessel", "spec": spec, "constants": consts.name})


def _near_axis_parts(k_z, m, sigma, consts):
    _check_int("m", m)
    if m < 1:
        raise DomainError(f"near-axis limit needs m >= 1, got {m}")
    _check_sigma(sigma)
    k = abs(k_z)
    if k == 0:
        raise DomainError("near-axis limit needs k_z != 0")
    coef = (1j * sigma) ** m / (math.sqrt(2.0) * k * 2**m * math.factorial(m))
    return coef, sigma * k_z, sigma * consts.c * k


def bessel_near_axis_chi(k_z, m, sigma, points, consts=NATURAL):
    r"""``k_perp -> 0`` limit of ``k_perp^(1-m) chi``:
    :math:`\frac{(i\sigma)^m}{\sqrt2 k 2^m m!} e^{-i\sigma(|k_z| c t - k_z z)} (x + i\sigma y)^m`.
    """
    coef, kappa, nu = _near_axis_parts(k_z, m, sigma, consts)
    pts = as_points(points)
    x, y, z, t = (pts[..., i] for i in range(4))
    return coef * np.exp(1j * (kappa * z - nu * t)) * (x + 1j * sigma * y) ** m


def near_axis_chi_field(k_z, m, sigma, consts=NATURAL):
    coef, kappa, nu = _near_axis_parts(k_z, m, sigma, consts)

    def jet(pts):
        x, y, z, t = (pts[..., i] for i in range(4))
        Z = np.exp(1j * (kappa * z - nu * t))
        one, zero = np.ones_like(x), np.zeros_like(x)
        K = _plane_factor_derivs(Z, kappa, nu, one, zero, zero, coef)
        return _separable_jet(m, sigma, K, x, y)

    return ScalarWaveField(
        lambda p: bessel_near_axis_chi(k_z, m, sigma, p, consts),
        jet=jet,
        meta={"family": "near_axis", "k_z": k_z, "m": m, "sigma": sigma},
    )


def _lg_common(spec, pts, consts):
    c, Om, sig = consts.c, spec.Omega, spec.sigma
    x, y, z, t = (pts[..., i] for i in range(4))
    a = spec.a(t + z / c, consts)
    if not np.all(np.real(1 / a) > 0):
        raise FloatingPointError("Gaussian factor of the LG beam must decay")
    E = np.exp(-1j * sig * Om * (t - z / c))
    u = (x * x + y * y) / a
    return x, y, a, E, u


def lg_chi(spec, points, consts=NATURAL):
    r"""Exact Laguerre-Gauss scalar

    .. math:: A\,e^{-i\sigma\Omega(t - z/c)} e^{i\sigma m\phi}
              \frac{\rho^m}{a^{n+m+1}} e^{-\rho^2/a} L_n^m(\rho^2/a),

    with ``a = l^2 + i sigma c^2 (t + z/c) / Omega`` on the principal branch.
    """
    pts = as_points(points)
    x, y, a, E, u = _lg_common(spec, pts, consts)
    n, m = spec.n, spec.m
    w = (x + 1j * spec.sigma * y) ** m
    return (
        spec.prefactor(consts) * E * w * a ** (-(n + m + 1)) * np.exp(-u) * laguerre_complex(n, m, u)
    )


def _lg_jet(spec, consts):
    n, m, sig, Om, c = spec.n, spec.m, spec.sigma, spec.Omega, consts.c
    N1 = n + m + 1
    A = spec.prefactor(consts)
    a_z = 1j * sig * c / Om
    a_t = 1j * sig * c**2 / Om
    Ez = 1j * sig * Om / c
    Et = -1j * sig * Om

    def jet(pts):
        x, y, a, E, u = _lg_common(spec, pts, consts)
        eu = np.exp(-u)
        L0 = laguerre_complex(n, m, u)
        L1 = -laguerre_complex(n - 1, m + 1, u)
        L2 = laguerre_complex(n - 2, m + 2, u)
        h0 = eu * L0
        h1 = eu * (L1 - L0)
        h2 = eu * (L2 - 2 * L1 + L0)
        p1 = a ** (-N1)
        p2 = p1 / a
        p3 = p2 / a
        G = p1 * h0
        Gs = p2 * h1
        Gss = p3 * h2
        Ga = -p2 * (N1 * h0 + u * h1)
        Gsa = -p3 * ((N1 + 1) * h1 + u * h2)
        Gaa = p3 * ((N1 + 1) * (N1 * h0 + u * h1) + u * ((N1 + 1) * h1 + u * h2))
        AE = A * E
        K = {
            "0": AE * G,
            "s": AE * Gs,
            "ss": AE * Gss,
            "z": AE * (Ez * G + Ga * a_z),
            "t": AE * (Et * G + Ga * a_t),
            "sz": AE * (Ez * Gs + Gsa * a_z),
            "st": AE * (Et * Gs + Gsa * a_t),
            "zz": AE * (Ez * Ez * G + 2 * Ez * Ga * a_z + Gaa * a_z * a_z),
            "tt": AE * (Et * Et * G + 2 * Et * Ga * a_t + Gaa * a_t * a_t),
            "zt": AE * (Ez * Et * G + Ez * Ga * a_t + Et * Ga * a_z + Gaa * a_z * a_t),
        }
        return _separable_jet(m, sig, K, x, y)

    return jet


def lg_chi_field(spec, consts=NATURAL):
    """:func:`lg_chi` as a :class:`ScalarWaveField` with analytic derivatives."""
    return ScalarWaveField(
        lambda p: lg_chi(spec, p, consts),
        jet=_lg_jet(spec, consts),
        meta={"family": "lg", "spec": spec, "constants": consts.name},
    )


def lg_rs_field(spec, points, consts=NATURAL):
    """RS vector of the exact LG beam: Whittaker map of the analytic second derivatives."""
    _, _, hess = _lg_jet(spec, consts)(as_points(points))
    return whittaker_from_derivatives(hess, consts.c)


def lg_field(spec, consts=NATURAL):
    """:func:`lg_rs_field` wrapped as an :class:`RSField` (derivatives of F by finite differences)."""
    return RSField(
        lambda p: lg_rs_field(spec, p, consts),
        meta={"family": "lg", "spec": spec, "constants": consts.name},
    )


def laguerre_integral_closed_form(n, nu, alpha, beta):
    r"""Right-hand side of
    :math:`\int_0^\infty x^{n+\nu/2} e^{-\alpha x} J_\nu(2\beta\sqrt x)\,dx
    = \frac{n!\,\beta^\nu e^{-\beta^2/\alpha}}{\alpha^{n+\nu+1}} L_n^\nu(\beta^2/\alpha)`.
    """
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    r = beta * beta / alpha
    return math.factorial(n) * beta**nu * math.exp(-r) / alpha ** (n + nu + 1) * laguerre(n, nu, r)


def laguerre_integral_quadrature(n, nu, alpha, beta, rtol=1e-12):
    """Left-hand side of :func:`laguerre_integral_closed_form` by composite Gauss-Legendre.

    Integrates in ``y = sqrt(x)`` so the integrand is smooth at the origin,
    truncates where ``exp(-alpha y^2)`` drops below 1e-40 of its peak
    envelope, and doubles the panel count until two passes agree to ``rtol``.

    Returns
    -------
    value, l1 : float
        The integral and the integral of the absolute integrand (scale for
        judging cancellation).
    """
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    expo = 2 * n + nu + 1
    # envelope y^expo exp(-alpha y^2) peaks at sqrt(expo / 2 alpha)
    ymax = math.sqrt((expo / 2 + 95.0) / alpha) + math.sqrt(expo / (2 * alpha))
    nodes, weights = np.polynomial.legendre.leggauss(24)

    def integrand(y):
        return 2.0 * y**expo * np.exp(-alpha * y * y) * bessel_j(nu, 2.0 * beta * y)

    def composite(panels):
        edges = np.linspace(0.0, ymax, panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        y = mid[:, None] + half[:, None] * nodes[None, :]
        f = integrand(y)
        return float(np.sum(half[:, None] * weights * f)), float(np.sum(half[:, None] * weights * np.abs(f)))

    panels = max(8, int(4 * beta * ymax / math.pi) + 8)
    prev, _ = composite(panels)
    for _ in range(12):
        panels *= 2
        cur, l1 = composite(panels)
        if abs(cur - prev) <= rtol * max(abs(cur), l1 * 1e-3):
            return cur, l1
        prev = cur
    return cur, l1


def plane_wave_bessel_expansion(k, r, m_max=40):
    r"""Partial sum :math:`e^{ik_z z}\sum_{|m|\le M} i^m e^{im(\phi-\varphi)} J_m(k_\perp\rho)`.

    Parameters
    ----------
    k : array_like, shape (3,)
        Wave vector.
    r : array_like, shape (..., 3)
        Spatial points.
    """
    k = np.asarray(k, dtype=float)
    r = np.asarray(r, dtype=float)
    kperp = math.hypot(k[0], k[1])
    vphi = math.atan2(k[1], k[0])
    rho = np.hypot(r[..., 0], r[..., 1])
    phi = np.arctan2(r[..., 1], r[..., 0])
    xi = kperp * rho
    total = np.zeros(rho.shape, dtype=complex)
    for m in range(-m_max, m_max + 1):
        total = total + (1j**m) * np.exp(1j * m * (phi - vphi)) * bessel_j(m, xi)
    return np.exp(1j * k[2] * r[..., 2]) * total
