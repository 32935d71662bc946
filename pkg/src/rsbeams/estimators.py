"""scikit-learn style wrappers around the beam catalog and the spectral weight.

Beam estimators take hyperparameters in ``__init__``, validate them in
``fit`` (which ignores its data argument) and map spacetime samples
``X`` of shape ``(n, 4)`` to complex RS vectors of shape ``(n, 3)`` in
``transform``. They compose with ``sklearn.pipeline`` and ``clone``.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .beams import (
    BesselBeamSpec,
    LGBeamSpec,
    bessel_chi,
    bessel_near_axis_chi,
    bessel_rs_field,
    lg_chi,
    lg_rs_field,
    near_axis_chi_field,
)
from .fields import NATURAL, SI, whittaker_map
from .spectrum import normalization_constant, spectral_peak, spectral_weight

__all__ = ["BesselBeam", "LGBeam", "NearAxisBeam", "SpectralWeight", "constants_for"]


def constants_for(units):
    if units == "natural":
        return NATURAL
    if units == "si":
        return SI
    raise ValueError(f"units must be 'natural' or 'si', got {units!r}")


def _points(X):
    X = check_array(X, dtype=float, ensure_all_finite=True)
    if X.shape[1] != 4:
        raise ValueError(f"expected 4 columns (x, y, z, t), got {X.shape[1]}")
    return X


class _BeamBase(TransformerMixin, BaseEstimator):
    def fit(self, X=None, y=None):
        self.spec_ = self._make_spec()
        self.constants_ = constants_for(self.units)
        if X is not None:
            self.n_features_in_ = _points(X).shape[1]
        return self

    def scalar(self, X):
        """The scalar potential ``chi`` at the sample points."""
        check_is_fitted(self, "spec_")
        return self._chi(_points(X))


class BesselBeam(_BeamBase):
    """Bessel beam of given transverse/axial wavenumbers, azimuthal index and helicity.

    Examples
    --------
    >>> import numpy as np
    >>> F = BesselBeam(k_perp=1.0, k_z=2.0).fit().transform(np.zeros((1, 4)))
    >>> F.shape
    (1, 3)
    """

    def __init__(self, k_perp=1.0, k_z=5.0, m=0, sigma=1, basis="cartesian", units="natural"):
        self.k_perp = k_perp
        self.k_z = k_z
        self.m = m
        self.sigma = sigma
        self.basis = basis
        self.units = units

    def _make_spec(self):
        if self.basis not in ("cartesian", "cylindrical"):
            raise ValueError(f"unknown basis {self.basis!r}")
        return BesselBeamSpec(self.k_perp, self.k_z, self.m, self.sigma)

    def _chi(self, X):
        return bessel_chi(self.spec_, X, self.constants_)

    def transform(self, X):
        check_is_fitted(self, "spec_")
        return bessel_rs_field(self.spec_, _points(X), self.constants_, basis=self.basis)


class LGBeam(_BeamBase):
    """Exact Laguerre-Gauss beam; ``transform`` returns the Cartesian RS vector."""

    def __init__(self, Omega=10.0, n=0, m=0, l=1.0, sigma=1, units="natural"):  # noqa: E741
        self.Omega = Omega
        self.n = n
        self.m = m
        self.l = l  # noqa: E741
        self.sigma = sigma
        self.units = units

    def _make_spec(self):
        return LGBeamSpec(self.Omega, self.n, self.m, self.l, self.sigma)

    def _chi(self, X):
        return lg_chi(self.spec_, X, self.constants_)

    def transform(self, X):
        check_is_fitted(self, "spec_")
        return lg_rs_field(self.spec_, _points(X), self.constants_)


class NearAxisBeam(_BeamBase):
    """Small-``k_perp`` limit of a Bessel beam with ``m >= 1``."""

    def __init__(self, k_z=1.0, m=1, sigma=1, units="natural"):
        self.k_z = k_z
        self.m = m
        self.sigma = sigma
        self.units = units

    def _make_spec(self):
        # building the field validates m, sigma and k_z
        near_axis_chi_field(self.k_z, self.m, self.sigma)
        return {"k_z": self.k_z, "m": self.m, "sigma": self.sigma}

    def _chi(self, X):
        return bessel_near_axis_chi(self.k_z, self.m, self.sigma, X, self.constants_)

    def transform(self, X):
        check_is_fitted(self, "spec_")
        chi = near_axis_chi_field(self.k_z, self.m, self.sigma, self.constants_)
        return whittaker_map(chi, _points(X), self.constants_)


class SpectralWeight(RegressorMixin, BaseEstimator):
    """Normalized spectral weight of an exact LG beam as a predictor ``omega -> w``.

    ``fit`` computes the normalization constant and the peak frequency;
    ``predict`` accepts a column (or 1-D array) of frequencies.
    """

    def __init__(self, Omega=10.0, n=0, m=0, l=1.0, sigma=1, units="natural"):  # noqa: E741
        self.Omega = Omega
        self.n = n
        self.m = m
        self.l = l  # noqa: E741
        self.sigma = sigma
        self.units = units

    def fit(self, X=None, y=None):
        self.spec_ = LGBeamSpec(self.Omega, self.n, self.m, self.l, self.sigma)
        self.constants_ = constants_for(self.units)
        self.norm_const_ = normalization_constant(self.spec_, self.constants_)
        self.peak_omega_ = spectral_peak(self.spec_, self.constants_)
        return self

    def predict(self, X):
        check_is_fitted(self, "norm_const_")
        om = np.asarray(X, dtype=float)
        if om.ndim == 2:
            om = check_array(om, ensure_all_finite=True)
            if om.shape[1] != 1:
                raise ValueError("predict expects a single frequency column")
            om = om[:, 0]
        return spectral_weight(self.spec_, om, self.constants_, norm=self.norm_const_)
