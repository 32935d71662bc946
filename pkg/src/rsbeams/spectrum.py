r"""Frequency content of exact LG beams.

At a fixed spatial point the LG scalar is a superposition of Bessel modes,
one per frequency :math:`|\omega| \ge \Omega`, with

.. math:: k_- = (|\omega| - \Omega)/c,\quad k_z = (2\Omega - |\omega|)/c,\quad
          k_\perp = 2\sqrt{(|\omega| - \Omega)\Omega}/c,

and the weight :math:`w(\omega) = C\,\theta(|\omega|-\Omega)\,k_-^{s}e^{-\beta k_-}`,
``s = n + m/2``, ``beta = l^2 Omega / c``. The constant ``C`` is fixed by
numerically enforcing :math:`\int w\,d\omega = 1`.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar
from scipy.special import gammaincinv

from .beams import LGBeamSpec, lg_chi
from .errors import DomainError, InsufficientResolutionError, QuadratureError
from .fields import NATURAL
from .specfun import bessel_j

__all__ = [
    "SignMismatchWarning",
    "SpectralCurve",
    "FourierCheck",
    "frequency_parameters",
    "normalization_constant",
    "normalization_constant_closed_form",
    "spectral_weight",
    "spectral_peak",
    "spectral_peak_search",
    "spectral_curve",
    "spectral_quantile",
    "fourier_crosscheck",
]


class SignMismatchWarning(UserWarning):
    """A frequency of the wrong sign for the beam's helicity was requested."""


def _beta(spec, consts):
    return spec.l**2 * spec.Omega / consts.c


def frequency_parameters(spec, omega, consts=NATURAL):
    """``(k_-, k_z, k_perp)`` of the Bessel mode at frequency ``omega`` (``|omega| >= Omega``)."""
    a = np.abs(np.asarray(omega, dtype=float))
    c, Om = consts.c, spec.Omega
    if np.any(a < Om):
        raise DomainError("frequency below the cutoff has no Bessel mode")
    return (a - Om) / c, (2 * Om - a) / c, 2 * np.sqrt((a - Om) * Om) / c


def normalization_constant(spec, consts=NATURAL):
    """``C`` such that ``int w d omega = 1``, by adaptive quadrature.

    Substituting ``x = beta k_-`` leaves the dimensionless integral
    ``int_0^inf x^s e^(-x) dx``; then ``C = beta^(s+1) / (c I)``.
    """
    s = spec.s
    val, err = quad(lambda x: x**s * math.exp(-x), 0.0, np.inf, epsabs=0.0, epsrel=1e-13, limit=200)
    if not err <= 1e-10 * val:
        raise QuadratureError("normalization integral did not converge", estimate=val, error=err)
    return _beta(spec, consts) ** (s + 1) / (consts.c * val)


def normalization_constant_closed_form(spec, consts=NATURAL):
    """``beta^(s+1) / (c Gamma(s+1))``, an independent check of :func:`normalization_constant`."""
    s = spec.s
    return _beta(spec, consts) ** (s + 1) / (consts.c * math.gamma(s + 1))


def spectral_weight(spec, omega, consts=NATURAL, norm=None):
    """Normalized spectral weight ``w(omega)``.

    Frequencies whose sign differs from ``spec.sigma`` get weight 0 and
    raise a :class:`SignMismatchWarning`.

    Parameters
    ----------
    norm : float, optional
        Precomputed :func:`normalization_constant`.
    """
    if not isinstance(spec, LGBeamSpec):
        raise TypeError("spectral weight needs an LGBeamSpec")
    om = np.asarray(omega, dtype=float)
    C = normalization_constant(spec, consts) if norm is None else norm
    wrong = np.sign(om) == -spec.sigma
    if np.any(wrong):
        warnings.warn("frequency sign does not match the helicity; weight set to 0", SignMismatchWarning, stacklevel=2)
    km = (np.abs(om) - spec.Omega) / consts.c
    above = (km > 0) & ~wrong
    out = np.zeros(om.shape)
    kma = km[above]
    # log form keeps large s and beta from overflowing
    out[above] = C * np.exp(spec.s * np.log(kma) - _beta(spec, consts) * kma)
    if spec.s == 0:
        out[(km == 0) & ~wrong] = C
    return out if om.ndim else float(out)


def spectral_peak(spec, consts=NATURAL):
    """Stationary point of ``s ln k_- - beta k_-``: ``Omega + s c^2 / (l^2 Omega)`` (``Omega`` for ``s = 0``)."""
    return spec.sigma * (spec.Omega + spec.s * consts.c**2 / (spec.l**2 * spec.Omega))


def spectral_peak_search(spec, consts=NATURAL, span=None, xtol=1e-12):
    """Maximizer of ``log w`` by golden-section search over ``[Omega, Omega + span]``.

    An independent check of :func:`spectral_peak`; ``span`` defaults to
    ``(4 s + 10) c^2 / (l^2 Omega)``.
    """
    scale = consts.c**2 / (spec.l**2 * spec.Omega)
    span = (4 * spec.s + 10) * scale if span is None else span
    Om, c, beta, s = spec.Omega, consts.c, _beta(spec, consts), spec.s
    if s == 0:
        return spec.sigma * Om

    # work in the offset u = (omega - Omega) / scale, where the peak sits at s
    def neg_log_w(u):
        km = u * scale / c
        return -(s * math.log(km) - beta * km) if km > 0 else math.inf

    res = minimize_scalar(
        neg_log_w, bracket=(1e-9 * span / scale, s, span / scale), method="golden", options={"xtol": xtol}
    )
    return spec.sigma * (Om + res.x * scale)


@dataclass(frozen=True)
class SpectralCurve:
    """Uniform samples of ``w(omega)``."""

    omega: np.ndarray
    w: np.ndarray
    spec: LGBeamSpec
    norm_const: float
    constants: str

    @property
    def peak_height(self):
        return float(np.max(self.w))

    @property
    def peak_omega(self):
        return float(self.omega[int(np.argmax(self.w))])

    def integral(self):
        """Trapezoid integral over the sampled range."""
        return float(np.trapezoid(self.w, self.omega))


def spectral_curve(spec, omega_range, count, consts=NATURAL):
    """Sample ``w`` at ``count`` uniformly spaced frequencies in ``omega_range``."""
    lo, hi = (float(v) for v in omega_range)
    if count < 2 or int(count) != count:
        raise DomainError("count must be an integer >= 2")
    if not (np.isfinite(lo) and np.isfinite(hi) and 0 < lo < hi):
        raise DomainError("frequency range must satisfy 0 < lo < hi")
    om = spec.sigma * np.linspace(lo, hi, int(count))
    C = normalization_constant(spec, consts)
    return SpectralCurve(om, spectral_weight(spec, om, consts, norm=C), spec, C, consts.name)


def spectral_quantile(spec, q, consts=NATURAL):
    """Frequency ``|omega|`` below which a fraction ``q`` of the weight lies."""
    x = gammaincinv(spec.s + 1, q)
    return spec.Omega + consts.c * x / _beta(spec, consts)


@dataclass(frozen=True)
class FourierCheck:
    """Windowed transform of ``lg_chi(t)`` at one spatial point against the spectral model."""

    omega: np.ndarray
    numeric: np.ndarray
    model: np.ndarray
    scale: float
    central: np.ndarray
    shape_deviation: float
    below_cutoff_leakage: float


def fourier_crosscheck(spec, point, window, consts=NATURAL, count=400, samples_per_width=8):
    r"""Compare a Hann-windowed time transform of the LG scalar with ``w(omega)`` times a Bessel mode.

    Computes :math:`\frac{1}{2\pi}\int_{-T/2}^{T/2}\chi(t)h(t)e^{i\omega t}dt` with
    Hann window ``h`` scaled to unit mean, after demodulating the carrier
    ``exp(-i sigma Omega t)`` so the slowly varying envelope can be sampled
    on a grid tied to the spectral width ``c^2 / (l^2 Omega)``. The model is
    ``|w(omega) J_m(k_perp rho)|``; its overall constant is fitted by least
    squares over frequencies with the central 80% of the weight (10% to 90%
    quantiles), where the largest deviation relative to the fitted peak is
    reported.

    Parameters
    ----------
    point : sequence of 3 floats
        ``(x, y, z)``.
    window : float
        Total window length ``T``.

    Raises
    ------
    InsufficientResolutionError
        If ``T c^2 / (l^2 Omega) < 10``.
    """
    x, y, z = (float(v) for v in point)
    width = consts.c**2 / (spec.l**2 * spec.Omega)
    if window * width < 10:
        raise InsufficientResolutionError(
            f"window {window} covers only {window * width:.3g} spectral widths (need >= 10)"
        )
    s, sig, Om = spec.s, spec.sigma, spec.Omega
    # frequency grid: a band below the cutoff plus the bulk of the weight
    top = spectral_quantile(spec, 1 - 1e-9, consts) - Om
    offsets = np.linspace(-0.25 * top, top, count)
    # envelope bandwidth is about `top`; sample well above Nyquist for it
    dt = math.pi / (samples_per_width * top)
    nt = int(math.ceil(window / dt)) | 1
    t = np.linspace(-window / 2, window / 2, nt)
    dt = t[1] - t[0]
    pts = np.stack(np.broadcast_arrays(x, y, z, t), axis=-1)
    env = lg_chi(spec, pts, consts) * np.exp(1j * sig * Om * t)
    hann = 1.0 + np.cos(2 * np.pi * t / window)  # unit mean on the window
    weights = np.full(nt, dt)
    weights[[0, -1]] *= 0.5
    num = np.empty(count, dtype=complex)
    for i, d in enumerate(offsets):
        num[i] = np.sum(weights * hann * env * np.exp(1j * sig * d * t)) / (2 * np.pi)
    mag = np.abs(num)

    om = sig * (Om + offsets)
    w = spectral_weight(spec, om, consts)
    rho = math.hypot(x, y)
    kp = 2 * np.sqrt(np.clip(offsets, 0, None) * Om) / consts.c
    model = np.abs(w * bessel_j(spec.m, kp * rho))

    lo, hi = spectral_quantile(spec, 0.1, consts) - Om, spectral_quantile(spec, 0.9, consts) - Om
    central = (offsets >= lo) & (offsets <= hi)
    mm = model[central]
    denom = float(np.dot(mm, mm))
    if denom == 0:
        scale = 0.0
        dev = float(np.max(mag[central])) if np.any(central) else 0.0
    else:
        scale = float(np.dot(mag[central], mm) / denom)
        dev = float(np.max(np.abs(mag[central] - scale * mm)) / (scale * np.max(mm)))
    resolution = 4 * np.pi / window
    below = offsets < -10 * resolution
    peak = float(np.max(mag))
    leak = float(np.max(mag[below]) / peak) if np.any(below) and peak > 0 else 0.0
    return FourierCheck(om, mag, model, scale, central, dev, leak)
