r"""Momentum-space photon amplitudes, plane-wave synthesis, norms and expectation values.

A field is the plane-wave superposition

.. math:: \mathbf F(\mathbf r, t) = \int\frac{d^3k}{(2\pi)^3}\,\mathbf e(\mathbf k)
          \left(f^+(\mathbf k) e^{-i\omega t + i\mathbf k\cdot\mathbf r}
          + f^-(\mathbf k) e^{i\omega t - i\mathbf k\cdot\mathbf r}\right),

and the photon wave functions are :math:`\psi^+ = f^+`, :math:`\psi^- = (f^-)^*`.

Beam amplitudes carry delta functions, which are never mollified:

* Bessel amplitudes live on the circle ``k_perp' = k_perp, k_z' = k_z`` and
  only the azimuthal profile is stored;
* LG amplitudes live on the paraboloid ``k_+' = Omega / c`` (with
  ``k_(+/-) = (k +/- k_z)/2``) and are stored as a smooth density ``Q`` over
  ``(k_-, phi)``. In these variables ``d^3k = 2 k dk_+ dk_- dphi``, and the
  change of variables from ``(k_perp, k_z)`` contributes the factor
  ``k_perp / (2 k)`` that is folded into ``Q``.

Norms of LG amplitudes contain ``delta(0)`` in ``k_+``. Two finite
regularizations are offered:

``'shell'``
    the ``delta(0)`` factor is dropped; ratios (expectation values) are
    unaffected by this choice.
``'per_length'``
    values per unit length along z of a fixed-time slice. At fixed
    ``k_perp`` one has ``dk_z / dk_+ = k / k_+``, so ``delta(0)`` becomes
    ``L k / (2 pi k_+)`` and the integrand gains the weight ``k / (2 pi k_+)``.
    These numbers compare directly with transverse integrals of the field.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad_vec

from .beams import BesselBeamSpec, LGBeamSpec, polarization_vector
from .errors import DomainError, NonNormalizableError, QuadratureError
from .fields import (
    NATURAL,
    as_points,
    energy_density,
    momentum_density,
    transverse_integral,
    _periodic_mean,
)

__all__ = [
    "BesselAmplitude",
    "ShellAmplitude",
    "LGAmplitude",
    "AmplitudePair",
    "CoherentStateData",
    "REGULARIZATIONS",
    "synthesize_bessel_field",
    "synthesize_shell_field",
    "photon_norm",
    "lg_norm_closed_form",
    "expectation_mz",
    "expectation_energy",
    "expectation_pz",
    "expectation_helicity",
    "coherent_state_decompose",
    "classical_mz_functional",
    "classical_totals_per_length",
]

REGULARIZATIONS = ("shell", "per_length")

_TWO_PI = 2.0 * np.pi
# absolute target that only an identically zero integrand meets
_TINY = np.finfo(float).tiny
_PROFILE_NORM = math.sqrt(2.0) * _TWO_PI**2


@dataclass(frozen=True)
class BesselAmplitude:
    r"""Amplitude of a Bessel beam on its delta-constrained circle.

    The azimuthal profile is :math:`\lambda\,(-i)^m\sqrt2(2\pi)^2 k\,e^{im\varphi'}`
    for ``sigma = +1`` and its complex conjugate for ``sigma = -1``, where
    ``lambda`` is ``scale`` (conjugated along with the rest).
    """

    spec: BesselBeamSpec
    scale: complex = 1.0

    @classmethod
    def for_closed_form(cls, spec):
        """Amplitude whose synthesis equals :func:`~rsbeams.beams.bessel_rs_field` of ``spec``.

        The bare profile synthesizes ``sqrt(2) k k_perp (i sigma)^(-m)`` times
        the closed-form field, hence the scale ``(i)^m / (sqrt(2) k k_perp)``
        (conjugated for negative helicity by the profile itself).
        """
        return cls(spec, 1j**spec.m / (math.sqrt(2.0) * spec.k * spec.k_perp))

    @property
    def helicity(self):
        return self.spec.sigma

    def profile(self, phi):
        sp = self.spec
        val = self.scale * (-1j) ** sp.m * _PROFILE_NORM * sp.k * np.exp(1j * sp.m * np.asarray(phi))
        return val if sp.sigma == 1 else np.conj(val)


def _plane_wave_sum(kvec, amp, pts, sigma, consts):
    """``e(k) amp exp(-i sigma (omega t - k.r))`` with angle-major broadcasting."""
    e = polarization_vector(kvec)  # (n, 3)
    omega = consts.c * np.linalg.norm(kvec, axis=-1)
    extra = (1,) * (pts.ndim - 1)
    kr = (
        kvec[:, 0].reshape((-1,) + extra) * pts[..., 0]
        + kvec[:, 1].reshape((-1,) + extra) * pts[..., 1]
        + kvec[:, 2].reshape((-1,) + extra) * pts[..., 2]
    )
    phase = np.exp(-1j * sigma * (omega.reshape((-1,) + extra) * pts[..., 3] - kr))
    w = (amp.reshape((-1,) + extra) * phase)[..., None]
    return w * e.reshape((-1,) + extra + (3,))


def synthesize_bessel_field(amp, points, consts=NATURAL, rtol=1e-13):
    r"""Plane-wave synthesis of a Bessel amplitude.

    With the deltas consumed the superposition reduces to

    .. math:: \mathbf F = \frac{k_\perp}{(2\pi)^3}\int_0^{2\pi} d\varphi'\,
              \mathbf e(\mathbf k') P(\varphi') e^{\mp i(\omega t - \mathbf k'\cdot\mathbf r)},

    evaluated by trapezoid doubling, which converges geometrically for this
    periodic integrand.

    Raises
    ------
    QuadratureError
        If the azimuthal rule has not converged at 8192 nodes.
    """
    pts = as_points(points)
    sp = amp.spec

    def integrand(ang):
        kvec = np.stack(
            [sp.k_perp * np.cos(ang), sp.k_perp * np.sin(ang), np.full_like(ang, sp.k_z)], axis=-1
        )
        return _plane_wave_sum(kvec, amp.profile(ang), pts, sp.sigma, consts)

    mean, _ = _periodic_mean(integrand, rtol, 1e-300)
    return sp.k_perp * _TWO_PI * mean / _TWO_PI**3


@dataclass(frozen=True)
class ShellAmplitude:
    """Smooth density ``Q(k_-, phi)`` on the paraboloid ``k_+ = K``.

    Parameters
    ----------
    density : callable
        ``density(k_minus, phi)`` with broadcasting arrays; must decay fast
        enough in ``k_minus`` for the moments to exist.
    K : float
        The fixed value of ``k_+``.
    helicity : int
        +1 for an ``f^+`` amplitude, -1 for ``f^-``.
    wavefunction : bool
        True when the object already holds ``psi`` (so no conjugation is
        needed for negative helicity).
    """

    density: object
    K: float
    helicity: int = 1
    wavefunction: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.helicity not in (1, -1):
            raise DomainError("helicity must be +1 or -1")
        if not self.K > 0:
            raise DomainError("K must be positive")

    def __call__(self, k_minus, phi):
        return self.density(k_minus, phi)

    def scaled(self, factor):
        d = self.density
        return ShellAmplitude(lambda km, ph: factor * d(km, ph), self.K, self.helicity, self.wavefunction, self.meta)

    def __add__(self, other):
        if (other.K, other.helicity, other.wavefunction) != (self.K, self.helicity, self.wavefunction):
            raise DomainError("only amplitudes on the same shell with the same helicity can be added")
        a, b = self.density, other.density
        return ShellAmplitude(lambda km, ph: a(km, ph) + b(km, ph), self.K, self.helicity, self.wavefunction)

    def as_wavefunction(self):
        """``psi``: unchanged for positive helicity, complex conjugate for negative."""
        if self.wavefunction or self.helicity == 1:
            return ShellAmplitude(self.density, self.K, self.helicity, True, self.meta)
        d = self.density
        return ShellAmplitude(lambda km, ph: np.conj(d(km, ph)), self.K, self.helicity, True, self.meta)

    def wave_vectors(self, k_minus, phi):
        """``(k_x, k_y, k_z)`` on the shell; broadcasting over ``k_minus`` and ``phi``."""
        km, ph = np.broadcast_arrays(np.asarray(k_minus, dtype=float), np.asarray(phi, dtype=float))
        kp = 2.0 * np.sqrt(self.K * km)
        return np.stack([kp * np.cos(ph), kp * np.sin(ph), self.K - km], axis=-1)


def LGAmplitude(spec, consts=NATURAL, scale=1.0):
    r"""Amplitude of the exact LG beam as a :class:`ShellAmplitude`.

    .. math:: Q(k_-, \varphi) = \lambda\,(-i)^m\sqrt2(2\pi)^2 k\,e^{im\varphi}
              k_-^{n+m/2} e^{-l^2\Omega k_-/c}\,\frac{k_\perp}{2k},

    with ``k = K + k_-``, ``k_perp = 2 sqrt(K k_-)``, ``K = Omega / c``; complex
    conjugated for ``sigma = -1``.
    """
    if not isinstance(spec, LGBeamSpec):
        raise TypeError("LGAmplitude needs an LGBeamSpec")
    K = spec.Omega / consts.c
    beta = spec.l**2 * spec.Omega / consts.c
    s, m = spec.s, spec.m
    pref = scale * (-1j) ** m * _PROFILE_NORM

    def density(k_minus, phi):
        km = np.asarray(k_minus, dtype=float)
        kperp = 2.0 * np.sqrt(K * km)
        val = pref * 0.5 * kperp * np.exp(1j * m * np.asarray(phi)) * km**s * np.exp(-beta * km)
        return val if spec.sigma == 1 else np.conj(val)

    return ShellAmplitude(density, K, spec.sigma, False, {"spec": spec, "scale": scale})


def lg_norm_closed_form(spec, consts=NATURAL, scale=1.0):
    r"""Shell norm of :func:`LGAmplitude` in closed form,
    :math:`|\lambda|^2\,4(2\pi)^2\frac{\Omega}{c^2}\,\Gamma(2s+2)/(2\beta)^{2s+2}`,
    ``s = n + m/2``, ``beta = l^2 Omega / c``.
    """
    beta = spec.l**2 * spec.Omega / consts.c
    s = spec.s
    log = math.lgamma(2 * s + 2) - (2 * s + 2) * math.log(2 * beta)
    return abs(scale) ** 2 * 4 * _TWO_PI**2 * spec.Omega / consts.c**2 * math.exp(log)


@dataclass(frozen=True)
class AmplitudePair:
    """Classical amplitudes ``f^+`` and ``f^-``; either may be None."""

    plus: ShellAmplitude = None
    minus: ShellAmplitude = None

    def __post_init__(self):
        for a, h in ((self.plus, 1), (self.minus, -1)):
            if a is not None and a.helicity != h:
                raise DomainError("helicity tag does not match the slot")

    def parts(self):
        return [a for a in (self.plus, self.minus) if a is not None]


@dataclass(frozen=True)
class CoherentStateData:
    """Mean photon number and the normalized wave functions ``psi^+``, ``psi^-``."""

    mean_photon_number: float
    psi_plus: ShellAmplitude
    psi_minus: ShellAmplitude
    regularization: str
    defined: bool = True


def _as_pair(amp):
    if isinstance(amp, BesselAmplitude):
        raise NonNormalizableError(
            "Bessel amplitudes are delta-normalized on a circle; their photon norm is infinite"
        )
    if isinstance(amp, AmplitudePair):
        return amp
    if isinstance(amp, ShellAmplitude):
        return AmplitudePair(amp, None) if amp.helicity == 1 else AmplitudePair(None, amp)
    raise TypeError(f"unsupported amplitude type {type(amp).__name__}")


def _check_reg(regularization):
    if regularization not in REGULARIZATIONS:
        raise ValueError(f"unknown regularization {regularization!r}; expected one of {REGULARIZATIONS}")


def _dphi(density, km, ph, h=1e-3):
    """Fourth-order central difference in the azimuth."""
    return (
        density(km, ph - 2 * h) - 8 * density(km, ph - h) + 8 * density(km, ph + h) - density(km, ph + 2 * h)
    ) / (12 * h)


_MOMENTS = ("norm", "mz", "energy", "pz")


def _moments(psi, consts, regularization, rtol=1e-12):
    """Integrals of ``|psi|^2`` weighted by 1, the M_z kernel, omega and k_z over the shell.

    All moments share one set of quadrature nodes, so their ratios are free
    of the quadrature error common to numerator and denominator.
    """
    _check_reg(regularization)
    K, c, hbar = psi.K, consts.c, consts.hbar

    def radial(km):
        k = K + km
        weight = 2.0 / (_TWO_PI**3 * c)
        if regularization == "per_length":
            weight = weight * k / (_TWO_PI * K)

        def ang_fn(ang):
            q = psi.density(km, ang)
            dens = np.abs(q) ** 2
            mz = np.real(np.conj(q) * (-1j) * _dphi(psi.density, km, ang))
            return np.stack([dens, hbar * mz, hbar * c * k * dens, hbar * (K - km) * dens], axis=-1)

        mean, _ = _periodic_mean(ang_fn, 1e-14, 1e-300)
        return weight * _TWO_PI * mean

    res, err, info = quad_vec(radial, 0.0, np.inf, epsrel=rtol, epsabs=_TINY, limit=2000, full_output=True)
    if not info.success:
        raise QuadratureError("shell quadrature did not converge", estimate=res, error=err)
    return dict(zip(_MOMENTS, res))


def _pair_moments(amp, consts, regularization):
    pair = _as_pair(amp)
    out = []
    for part in pair.parts():
        out.append((part.helicity, _moments(part.as_wavefunction(), consts, regularization)))
    return out


def photon_norm(amp, consts=NATURAL, regularization="shell"):
    r"""``N = int dk/omega (|psi^+|^2 + |psi^-|^2)`` over the shell.

    Reduces to ``(2 / ((2 pi)^3 c)) int dk_- dphi |Q|^2`` (times the length
    weight for ``'per_length'``), evaluated by adaptive quadrature on the
    half line (``scipy.integrate.quad_vec``) around a periodic trapezoid rule.

    Raises
    ------
    NonNormalizableError
        For Bessel amplitudes.
    """
    return float(sum(mom["norm"] for _, mom in _pair_moments(amp, consts, regularization)))


def _expectation(amp, consts, key, regularization):
    moms = _pair_moments(amp, consts, regularization)
    total = sum(m["norm"] for _, m in moms)
    if total == 0:
        raise DomainError("expectation value undefined for a zero amplitude")
    return float(sum(m[key] for _, m in moms) / total)


def expectation_mz(amp, consts=NATURAL, regularization="shell"):
    """``<M_z>`` in the Whittaker gauge, ``-i hbar d/dphi`` on the wave function."""
    return _expectation(amp, consts, "mz", regularization)


def expectation_energy(amp, consts=NATURAL, regularization="shell"):
    """``<H> = (1/N) int dk/omega hbar omega |psi|^2``."""
    return _expectation(amp, consts, "energy", regularization)


def expectation_pz(amp, consts=NATURAL, regularization="shell"):
    """``<p_z> = (1/N) int dk/omega hbar k_z |psi|^2``."""
    return _expectation(amp, consts, "pz", regularization)


def expectation_helicity(amp, consts=NATURAL, regularization="shell"):
    """``(N^+ - N^-) / (N^+ + N^-)`` from the partial norms."""
    moms = _pair_moments(amp, consts, regularization)
    plus = sum(m["norm"] for h, m in moms if h == 1)
    minus = sum(m["norm"] for h, m in moms if h == -1)
    if plus + minus == 0:
        raise DomainError("helicity undefined for a zero amplitude")
    return float((plus - minus) / (plus + minus))


def coherent_state_decompose(f_plus=None, f_minus=None, consts=NATURAL, regularization="shell"):
    """Mean photon number and normalized wave functions of the coherent state of a classical field.

    ``<N> = (1/hbar) int dk/omega (|f^+|^2 + |f^-|^2)`` and
    ``psi^+ = f^+ / sqrt(hbar <N>)``, ``psi^- = (f^-)^* / sqrt(hbar <N>)``.
    A zero field gives ``<N> = 0`` with ``defined=False`` and no wave functions.
    """
    pair = AmplitudePair(f_plus, f_minus)
    if not pair.parts():
        return CoherentStateData(0.0, None, None, regularization, defined=False)
    norm = photon_norm(pair, consts, regularization)
    n_mean = norm / consts.hbar
    if norm == 0:
        return CoherentStateData(0.0, None, None, regularization, defined=False)
    inv = 1.0 / math.sqrt(norm)
    psi = [None if a is None else a.as_wavefunction().scaled(inv) for a in (f_plus, f_minus)]
    return CoherentStateData(n_mean, psi[0], psi[1], regularization)


def synthesize_shell_field(amp, points, consts=NATURAL, rtol=1e-10):
    r"""Plane-wave synthesis of a shell amplitude ``f``:

    .. math:: \mathbf F = \frac{1}{(2\pi)^3}\int_0^\infty dk_-\int_0^{2\pi}d\varphi\;
              2k\,\mathbf e(\mathbf k)\,Q(k_-,\varphi)\,e^{\mp i(\omega t - \mathbf k\cdot\mathbf r)}.

    Slow (a 2-D quadrature per call); meant as an oracle for closed forms.
    """
    pts = as_points(points)
    if amp.wavefunction:
        raise DomainError("synthesis needs the classical amplitude f, not a wave function")
    sig = amp.helicity

    def radial(km):
        if km == 0:
            return np.zeros(pts.shape[:-1] + (3,), dtype=complex)

        def ang_fn(ang):
            kvec = amp.wave_vectors(km, ang)
            return _plane_wave_sum(kvec, amp.density(km, ang), pts, sig, consts)

        mean, _ = _periodic_mean(ang_fn, 1e-13, 1e-300, nmax=1 << 15)
        return 2.0 * (amp.K + km) * _TWO_PI * mean

    res, err, info = quad_vec(radial, 0.0, np.inf, epsrel=rtol, epsabs=_TINY, limit=2000, full_output=True)
    if not info.success:
        raise QuadratureError("synthesis quadrature did not converge", estimate=res, error=err)
    return res / _TWO_PI**3


def classical_mz_functional(f_plus=None, f_minus=None, consts=NATURAL, nodes=(120, 64), rate=None):
    r"""Classical angular momentum ``M_z`` of a field given by its amplitudes, in momentum space.

    .. math:: M_z = \int\frac{dk}{\omega}\left(f^{+*}(-i\hbar\partial_\varphi)f^+
              + f^-(-i\hbar\partial_\varphi)f^{-*}\right)

    on the shell regularization. Deliberately shares no code path with
    :func:`expectation_mz`: a fixed Gauss-Laguerre rule in ``k_-`` (with
    decay ``rate``, default ``2 l^2 Omega / c`` for LG amplitudes) times a
    uniform azimuthal grid with the derivative taken spectrally by FFT.
    """
    total = 0.0
    n_rad, n_ang = nodes
    for f, conj in ((f_plus, False), (f_minus, True)):
        if f is None:
            continue
        r = rate
        if r is None:
            spec = f.meta.get("spec")
            if spec is None:
                raise DomainError("decay rate needed for amplitudes without an LG spec")
            r = 2 * spec.l**2 * spec.Omega / consts.c
        x, w = np.polynomial.laguerre.laggauss(n_rad)
        km = x / r
        wk = w * np.exp(x) / r
        ang = _TWO_PI * np.arange(n_ang) / n_ang
        q = f.density(km[:, None], ang[None, :])
        if conj:
            q = np.conj(q)
        freqs = np.fft.fftfreq(n_ang, d=1.0 / n_ang)
        dq = np.fft.ifft(1j * freqs * np.fft.fft(q, axis=1), axis=1)
        kern = np.real(np.conj(q) * (-1j) * consts.hbar * dq).mean(axis=1) * _TWO_PI
        total += 2.0 / (_TWO_PI**3 * consts.c) * np.sum(wk * kern)
    return float(total)


def classical_totals_per_length(field, consts=NATURAL, z=0.0, t=0.0, radius=8.0, rtol=1e-10):
    """Energy, z-momentum and z-angular momentum per unit length of a slice ``(z, t)``.

    Integrates ``F* . F``, the z component of ``Im(F* x F)/c`` and of
    ``r x Im(F* x F)/c`` over the disc of the given radius.

    Returns
    -------
    dict
        Keys ``'energy'``, ``'pz'``, ``'mz'``.
    """

    def density(rho, ang, z_, t_):
        x = rho * np.cos(ang)
        y = rho * np.sin(ang)
        pts = np.stack(np.broadcast_arrays(x, y, np.full_like(ang, z_), np.full_like(ang, t_)), axis=-1)
        F = field(pts)
        g = momentum_density(F, consts)
        return np.stack([energy_density(F), g[..., 2], x * g[..., 1] - y * g[..., 0]], axis=-1)

    res = transverse_integral(density, z, t, radius, rtol=rtol)
    return {"energy": float(res.value[0]), "pz": float(res.value[1]), "mz": float(res.value[2])}
