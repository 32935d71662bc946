r"""Cylindrical Bessel functions of integer order and associated Laguerre polynomials.

Everything here works on real arguments and broadcasts over numpy arrays.
Two evaluation paths are used for :math:`J_m(x)`:

* the ascending power series for small arguments, where the alternating
  terms never grow much larger than the result;
* Miller's backward recurrence, normalized with
  :math:`J_0 + 2\sum_{k\ge1} J_{2k} = 1`, everywhere else.

Forward recurrence is never used because it is unstable for :math:`m > x`.
"""

import math

import numpy as np

from .errors import DomainError

__all__ = [
    "SERIES_LIMIT",
    "LAGUERRE_MAX_DEGREE",
    "bessel_j",
    "bessel_j_prime",
    "bessel_j_scaled",
    "laguerre",
    "laguerre_complex",
]

#: Below this argument the power series is used. Its terms are bounded by
#: :math:`I_0(x)`, so cancellation stays below one digit here.
SERIES_LIMIT = 2.0

#: Largest radial index accepted by :func:`laguerre`.
LAGUERRE_MAX_DEGREE = 64

_RESCALE_AT = 1e250


def _as_real(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("Bessel argument must be finite")
    if np.any(x < 0):
        raise DomainError("Bessel argument must be non-negative")
    return x


def _check_order(m):
    if int(m) != m:
        raise DomainError(f"order must be an integer, got {m!r}")
    return int(m)


def _series_scaled(p, x):
    """Sum of the power series for J_p(x) / x**p, p >= 0."""
    q = 0.25 * x * x
    term = np.full_like(x, 1.0 / (2.0**p * math.factorial(p)))
    total = term.copy()
    for k in range(1, 60):
        term = term * (-q / (k * (k + p)))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _miller(p, x):
    """J_p(x) for p >= 0 and x > 0 by normalized backward recurrence."""
    top = max(p, float(np.max(x)))
    start = 2 * ((int(top) + 30 + int(math.sqrt(40.0 * top))) // 2)
    bjp = np.zeros_like(x)
    bj = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    ans = np.zeros_like(x)
    add_even = False
    for k in range(start, 0, -1):
        bjm = (2.0 * k / x) * bj - bjp
        bjp, bj = bj, bjm
        # bj now holds J_{k-1}, bjp holds J_k (up to a common factor)
        big = np.abs(bj) > _RESCALE_AT
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE_AT, 1.0)
            bj = bj * scale
            bjp = bjp * scale
            norm = norm * scale
            ans = ans * scale
        if add_even:
            norm = norm + bj
        add_even = not add_even
        if k == p:
            ans = bjp.copy()
    if p == 0:
        ans = bj.copy()
    norm = 2.0 * norm - bj
    return ans / norm


def _bessel_nonneg(p, x):
    out = np.empty_like(x)
    small = x < SERIES_LIMIT
    if np.any(small):
        xs = x[small]
        out[small] = _series_scaled(p, xs) * xs**p
    if np.any(~small):
        out[~small] = _miller(p, x[~small])
    return out


def bessel_j(m, x):
    """Bessel function of the first kind, integer order ``m``.

    Parameters
    ----------
    m : int
        Order, any sign. Negative orders use ``J_{-m} = (-1)^m J_m``.
    x : float or array_like
        Non-negative, finite argument.

    Returns
    -------
    float or ndarray
        Same shape as ``x``.
    """
    m = _check_order(m)
    xa = _as_real(x)
    p = abs(m)
    flat = np.atleast_1d(xa).astype(float).ravel()
    val = _bessel_nonneg(p, flat).reshape(np.shape(xa))
    if m < 0 and p % 2 == 1:
        val = -val
    return val if np.ndim(x) else float(val)


def bessel_j_prime(m, x):
    """Derivative of :func:`bessel_j`, from ``2 J'_m = J_{m-1} - J_{m+1}``."""
    m = _check_order(m)
    return 0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x))


def bessel_j_scaled(p, x):
    """``J_p(x) / x**p`` for ``p >= 0``, regular at ``x = 0``.

    At the origin this equals ``1 / (2**p p!)``. Used wherever a factor
    ``rho**p`` has been pulled out of a cylindrical mode.
    """
    p = _check_order(p)
    if p < 0:
        raise DomainError("scaled Bessel function needs p >= 0")
    xa = _as_real(x)
    flat = np.atleast_1d(xa).astype(float).ravel()
    out = np.empty_like(flat)
    small = flat < SERIES_LIMIT
    if np.any(small):
        out[small] = _series_scaled(p, flat[small])
    if np.any(~small):
        big = flat[~small]
        out[~small] = _miller(p, big) / big**p
    out = out.reshape(np.shape(xa))
    return out if np.ndim(x) else float(out)


def _laguerre_recurrence(n, m, x):
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = 1.0 + m - x
    for j in range(1, n):
        prev, cur = cur, ((2 * j + m + 1 - x) * cur - (j + m) * prev) / (j + 1)
    return cur


def _check_laguerre_indices(n, m):
    if int(n) != n or int(m) != m:
        raise DomainError("Laguerre indices must be integers")
    n, m = int(n), int(m)
    if n < 0 or m < 0:
        raise DomainError(f"Laguerre indices must be non-negative, got n={n}, m={m}")
    if n > LAGUERRE_MAX_DEGREE:
        raise DomainError(f"Laguerre degree capped at {LAGUERRE_MAX_DEGREE}, got {n}")
    return n, m


def laguerre(n, m, x):
    """Associated Laguerre polynomial ``L_n^m(x)`` by upward recurrence in ``n``.

    Examples
    --------
    >>> laguerre(1, 0, 2.0)
    -1.0
    >>> laguerre(2, 1, 0.0)
    3.0
    """
    n, m = _check_laguerre_indices(n, m)
    xa = np.asarray(x, dtype=float)
    val = _laguerre_recurrence(n, m, xa)
    return val if np.ndim(x) else float(val)


def laguerre_complex(n, m, z):
    """``L_n^m`` at complex argument, same recurrence coefficients as :func:`laguerre`.

    Returns 0 for ``n < 0`` so derivative formulas such as
    ``d/dz L_n^m = -L_{n-1}^{m+1}`` need no special casing.
    """
    if n < 0:
        return np.zeros_like(np.asarray(z, dtype=complex))
    n, m = _check_laguerre_indices(n, m)
    return _laguerre_recurrence(n, m, np.asarray(z, dtype=complex))
