import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, special

from rsbeams.beams import (
    BesselBeamSpec,
    LGBeamSpec,
    bessel_chi,
    bessel_chi_field,
    bessel_field,
    bessel_near_axis_chi,
    bessel_rs_field,
    k_plus_minus,
    laguerre_integral_closed_form,
    laguerre_integral_quadrature,
    lg_chi,
    lg_chi_field,
    lg_field,
    lg_modulation_time,
    lg_rs_field,
    near_axis_chi_field,
    plane_wave_bessel_expansion,
    polarization_vector,
)
from rsbeams.errors import DomainError, OnAxisBasisError, SingularDirectionError
from rsbeams.fields import (
    SI,
    FDSpec,
    ScalarWaveField,
    cylindrical_points,
    field_jacobian,
    curl_from_jacobian,
    relative_dalembert_residual,
    relative_maxwell_residual,
    whittaker_map,
)

EPS = np.zeros((3, 3, 3))
for _a, _b, _c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    EPS[_a, _b, _c], EPS[_a, _c, _b] = 1.0, -1.0

wave_vectors = st.tuples(
    st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10)
).filter(lambda k: math.hypot(k[0], k[1]) > 1e-3)


def random_k(rng, n):
    k = rng.normal(size=(n, 3)) * rng.uniform(0.1, 10, (n, 1))
    return k


# polarization vector


def test_polarization_along_x():
    assert np.allclose(polarization_vector([2.0, 0, 0]), np.array([0, -1j, 1]) / np.sqrt(2), atol=1e-15)


def test_polarization_singular_on_axis():
    with pytest.raises(SingularDirectionError):
        polarization_vector([0.0, 0.0, 3.0])


@given(wave_vectors)
def test_polarization_unit_norm_and_eigenvector(k):
    e = polarization_vector(k)
    n = np.asarray(k) / np.linalg.norm(k)
    assert np.linalg.norm(e) == pytest.approx(1.0, abs=1e-14)
    assert np.max(np.abs(np.cross(n, e) + 1j * e)) < 1e-12


def test_antisymmetric_product_sign(rng):
    # with n x e = -i e the product e_i e*_j - e*_i e_j equals -i eps_ijk n_k
    k = random_k(rng, 1000)
    e = polarization_vector(k)
    n = k / np.linalg.norm(k, axis=-1, keepdims=True)
    lhs = e[:, :, None] * np.conj(e)[:, None, :] - np.conj(e)[:, :, None] * e[:, None, :]
    levi = np.einsum("ijk,nk->nij", EPS, n)
    assert np.max(np.abs(lhs + 1j * levi)) < 1e-12
    # the opposite sign is off by exactly twice the Levi-Civita term
    assert np.max(np.abs(lhs - 1j * levi)) == pytest.approx(2.0, abs=1e-2)


@given(wave_vectors, st.floats(0, 2 * np.pi))
def test_polarization_phase_covariance(k, alpha):
    e = polarization_vector(k) * np.exp(1j * alpha)
    n = np.asarray(k) / np.linalg.norm(k)
    assert np.max(np.abs(np.cross(n, e) + 1j * e)) < 1e-12
    lhs = np.outer(e, np.conj(e)) - np.outer(np.conj(e), e)
    assert np.max(np.abs(lhs + 1j * np.einsum("ijk,k->ij", EPS, n))) < 1e-12


# Bessel beams


def test_bessel_spec_validation():
    with pytest.raises(DomainError):
        BesselBeamSpec(0.0, 1.0)
    with pytest.raises(DomainError):
        BesselBeamSpec(1.0, 1.0, 0.5)
    with pytest.raises(DomainError):
        BesselBeamSpec(1.0, 1.0, 0, 2)
    spec = BesselBeamSpec(3.0, 4.0, -2, -1)
    assert spec.k == 5.0 and spec.omega() == 5.0
    assert (spec.k_plus, spec.k_minus) == k_plus_minus(-1, 5.0, 4.0) == (-0.5, -4.5)


def test_bessel_chi_on_axis():
    spec = BesselBeamSpec(1.0, 2.0, 0, 1)
    assert bessel_chi(spec, np.zeros(4)) == pytest.approx(1 / (np.sqrt(2) * spec.k * 1.0), rel=1e-15)
    assert bessel_chi(BesselBeamSpec(1.0, 2.0, 3, 1), np.zeros(4)) == 0


@given(st.floats(0, 2 * np.pi), st.integers(-4, 4), st.sampled_from([1, -1]))
def test_bessel_screw_symmetry(alpha, m, sigma):
    spec = BesselBeamSpec(1.3, 2.1, m, sigma)
    p0 = cylindrical_points(0.8, 0.4, 0.3, 0.2)
    p1 = cylindrical_points(0.8, 0.4 + alpha, 0.3 - m * alpha / spec.k_z, 0.2)
    assert bessel_chi(spec, p1) == pytest.approx(bessel_chi(spec, p0), rel=1e-12, abs=1e-15)
    f0 = bessel_rs_field(spec, p0, basis="cylindrical")
    f1 = bessel_rs_field(spec, p1, basis="cylindrical")
    assert np.allclose(f1, f0, rtol=1e-12, atol=1e-14)


def test_bessel_sigma_conjugation(rng):
    pts = rng.uniform(-3, 3, (20, 4))
    for m in (0, 1, 4, -3):
        plus = bessel_chi(BesselBeamSpec(1.0, 2.0, m, 1), pts)
        minus = bessel_chi(BesselBeamSpec(1.0, 2.0, m, -1), pts)
        assert np.allclose(minus, np.conj(plus), rtol=1e-14, atol=1e-16)


def test_bessel_field_on_axis_m0():
    spec = BesselBeamSpec(1.0, 2.0, 0, 1)
    F = bessel_rs_field(spec, np.zeros(4))
    assert np.allclose(F, [0, 0, spec.k_perp / (np.sqrt(2) * spec.k)], atol=1e-15)


def test_cylindrical_components_rotate_into_cartesian():
    spec = BesselBeamSpec(1.0, 2.0, 2, 1)
    p = cylindrical_points(0.9, 1.1, 0.2, 0.3)
    cyl = bessel_rs_field(spec, p, basis="cylindrical")
    phi = 1.1
    rot = np.array([cyl[0] * np.cos(phi) - cyl[1] * np.sin(phi), cyl[0] * np.sin(phi) + cyl[1] * np.cos(phi), cyl[2]])
    assert np.max(np.abs(rot - bessel_rs_field(spec, p))) < 1e-12


def test_cylindrical_components_refuse_axis():
    with pytest.raises(OnAxisBasisError):
        bessel_rs_field(BesselBeamSpec(1.0, 2.0), np.zeros((2, 4)), basis="cylindrical")


@pytest.mark.parametrize("sigma", [1, -1])
def test_bessel_curl_eigenvalue_by_finite_differences(sigma, rng):
    spec = BesselBeamSpec(1.0, 5.0, 2, sigma)
    f = bessel_field(spec)
    pts = rng.uniform(-3, 3, (20, 4))
    F, jac = field_jacobian(f, pts, FDSpec.for_wavenumber(spec.k))
    res = curl_from_jacobian(jac) - sigma * spec.k * F
    assert np.max(np.linalg.norm(res, axis=-1)) < 1e-9 * spec.k * np.max(np.linalg.norm(F, axis=-1))


def test_bessel_jet_matches_finite_differences(rng):
    spec = BesselBeamSpec(1.2, -0.7, 3, -1)
    f = bessel_field(spec)
    pts = rng.uniform(-3, 3, (10, 4))
    _, jac = field_jacobian(f, pts)
    _, jac_fd = field_jacobian(f, pts, FDSpec.for_wavenumber(spec.k))
    assert np.max(np.abs(jac - jac_fd)) < 1e-9


@pytest.mark.parametrize("m", [0, 1, 3, -2])
@pytest.mark.parametrize("sigma", [1, -1])
def test_whittaker_of_bessel_scalar_by_finite_differences(m, sigma, rng):
    spec = BesselBeamSpec(1.0, 2.0, m, sigma)
    pts = rng.uniform(-3, 3, (20, 4))
    chi = ScalarWaveField(bessel_chi_field(spec).func)
    got = whittaker_map(chi, pts, fd=FDSpec.for_wavenumber(spec.k, rel=1e-2))
    ref = bessel_rs_field(spec, pts)
    assert np.max(np.abs(got - ref)) < 1e-8 * np.max(np.abs(ref))


def test_bessel_dalembert(rng):
    spec = BesselBeamSpec(1.0, 5.0, 5, 1)
    chi = ScalarWaveField(bessel_chi_field(spec).func)
    pts = rng.uniform(-3, 3, (20, 4))
    assert np.max(relative_dalembert_residual(chi, pts, fd=FDSpec.for_wavenumber(spec.k))) < 1e-8


# near-axis limit


def test_near_axis_examples(rng):
    k = 2.0
    assert bessel_near_axis_chi(k, 1, 1, [1.0, 0, 0, 0]) == pytest.approx(1j / (2 * np.sqrt(2) * k), rel=1e-15)
    assert bessel_near_axis_chi(k, 2, 1, [0.0, 0, 0.3, 0.1]) == 0
    with pytest.raises(DomainError):
        bessel_near_axis_chi(k, 0, 1, np.zeros(4))
    chi = ScalarWaveField(near_axis_chi_field(k, 2, -1).func)
    p = rng.uniform(-1, 1, 4)
    assert relative_dalembert_residual(chi, p, fd=FDSpec.for_wavenumber(k)) < 1e-8


@pytest.mark.parametrize("m", [1, 2, 3])
def test_near_axis_is_small_kperp_limit(m):
    k_z, sigma = 2.0, 1
    p = np.array([0.3, -0.2, 0.5, 0.1])
    kp = 1e-5
    spec = BesselBeamSpec(kp, k_z, m, sigma)
    exact = bessel_chi(spec, p) * kp ** (1 - m)
    # the limit keeps the k = |k_z| frequency; correct the full mode's phase for comparison
    freq_shift = np.exp(-1j * sigma * (spec.k - abs(k_z)) * p[3])
    scale = abs(k_z) / spec.k
    assert bessel_near_axis_chi(k_z, m, sigma, p) == pytest.approx(exact / freq_shift / scale, rel=1e-8)


# exact LG


def test_lg_spec_validation():
    with pytest.raises(DomainError):
        LGBeamSpec(10.0, 0, -1)
    with pytest.raises(DomainError):
        LGBeamSpec(-1.0)
    with pytest.raises(DomainError):
        LGBeamSpec(10.0, l=0.0)
    assert LGBeamSpec(10.0, 2, 3).s == 3.5


def test_lg_value_at_origin():
    assert lg_chi(LGBeamSpec(10.0, 0, 0, 1.0, 1), np.zeros(4)) == pytest.approx(0.1, rel=1e-15)


def test_lg_pure_gaussian(rng):
    spec = LGBeamSpec(10.0, 0, 0, 1.3, 1)
    pts = rng.uniform(-1, 1, (10, 4))
    x, y, z, t = pts.T
    a = spec.l**2 + 1j * (t + z) / spec.Omega
    gauss = np.exp(-1j * spec.Omega * (t - z)) * np.exp(-(x * x + y * y) / a) / a
    A = 1 / spec.Omega
    assert np.allclose(lg_chi(spec, pts), A * gauss, rtol=1e-14)


def test_lg_modulation_time_si():
    T = lg_modulation_time(1e15, 1e-3, SI.c)
    assert T == pytest.approx(1.1e-8, rel=0.02)
    # seven orders of magnitude beyond the carrier time scale 1/Omega
    assert round(math.log10(T * 1e15)) == 7


@pytest.mark.parametrize("sigma", [1, -1])
def test_lg_azimuthal_phase(sigma):
    spec = LGBeamSpec(10.0, 1, 2, 1.0, sigma)
    p0 = cylindrical_points(0.6, 0.0, 0.1, 0.02)
    p1 = cylindrical_points(0.6, 0.7, 0.1, 0.02)
    ratio = lg_chi(spec, p1) / lg_chi(spec, p0)
    assert ratio == pytest.approx(np.exp(1j * sigma * spec.m * 0.7), rel=1e-13)


def lg_points(rng, n, l=1.0, Omega=10.0):  # noqa: E741
    xyz = rng.uniform(-1.5 * l, 1.5 * l, (n, 3))
    t = rng.uniform(-0.5, 0.5, n) * l * l * Omega
    return np.column_stack([xyz, t])


def lg_fd(spec, rel=1e-3):
    hz = rel / spec.Omega
    return FDSpec(h=(rel * spec.l, rel * spec.l, hz, hz))


@pytest.mark.parametrize("n,m", [(0, 0), (1, 1), (2, 2), (1, 3)])
def test_lg_jet_matches_finite_differences(n, m, rng):
    spec = LGBeamSpec(10.0, n, m, 1.0, 1)
    chi = lg_chi_field(spec)
    pts = lg_points(rng, 10)
    _, g, h = chi.jet(pts)
    from rsbeams.fields import fd_gradient, fd_hessian

    g_fd = fd_gradient(chi.func, pts, lg_fd(spec))
    h_fd = fd_hessian(chi.func, pts, lg_fd(spec, 1e-2))
    assert np.max(np.abs(g - g_fd)) < 1e-8 * np.max(np.abs(g))
    assert np.max(np.abs(h - h_fd)) < 1e-6 * np.max(np.abs(h))


def test_lg_maxwell_residual(rng):
    spec = LGBeamSpec(20.0, 1, 2, 1.0, 1)
    pts = lg_points(rng, 20, Omega=20.0)
    assert np.max(relative_maxwell_residual(lg_field(spec), pts, fd=lg_fd(spec))) < 1e-6


def test_lg_transverse_decay():
    spec = LGBeamSpec(10.0, 1, 1, 1.0, 1)
    near = cylindrical_points(np.linspace(0, 2, 41), 0.3, 0.0, 0.0)
    far = cylindrical_points(8.0, np.linspace(0, 2 * np.pi, 9), 0.0, 0.0)
    peak = np.max(np.linalg.norm(lg_rs_field(spec, near), axis=-1))
    assert np.max(np.linalg.norm(lg_rs_field(spec, far), axis=-1)) < 1e-20 * peak


@pytest.mark.parametrize("sigma", [1, -1])
def test_lg_mz_eigenvalue(sigma, rng):
    from rsbeams.operators import apply_mz, eigenvalue_estimate

    spec = LGBeamSpec(10.0, 1, 2, 1.0, sigma)
    pts = lg_points(rng, 30)
    f = lg_field(spec)
    est = eigenvalue_estimate(f(pts), apply_mz(f, pts, fd=lg_fd(spec)))
    assert abs(est.rayleigh - sigma * spec.m) < 1e-6 * spec.m


# integrals and expansions


def test_laguerre_integral_closed_form_against_scipy():
    n, nu, alpha, beta = 2, 3, 1.3, 0.8
    val, _ = integrate.quad(
        lambda x: x ** (n + nu / 2) * np.exp(-alpha * x) * special.jv(nu, 2 * beta * np.sqrt(x)),
        0,
        np.inf,
        epsabs=0,
        epsrel=1e-12,
        limit=200,
    )
    assert laguerre_integral_closed_form(n, nu, alpha, beta) == pytest.approx(val, rel=1e-10)


@pytest.mark.parametrize("n", range(5))
@pytest.mark.parametrize("nu", range(5))
def test_laguerre_integral_identity(n, nu):
    for alpha in (0.6, 1.1, 3.0):
        for beta in (0.3, 1.1, 2.5):
            got, l1 = laguerre_integral_quadrature(n, nu, alpha, beta)
            ref = laguerre_integral_closed_form(n, nu, alpha, beta)
            assert abs(got - ref) <= 1e-6 * abs(ref)


def test_laguerre_integral_domain():
    with pytest.raises(DomainError):
        laguerre_integral_closed_form(1, 1, 0.0, 1.0)


@given(
    st.floats(0.1, 5.0),
    st.floats(0, 2 * np.pi),
    st.floats(-3, 3),
    st.floats(0, 1),
    st.floats(0, 2 * np.pi),
    st.floats(-2, 2),
)
def test_plane_wave_bessel_expansion(kp, vphi, kz, frac, phi, z):
    rho = frac * 10.0 / kp
    k = np.array([kp * np.cos(vphi), kp * np.sin(vphi), kz])
    r = np.array([rho * np.cos(phi), rho * np.sin(phi), z])
    assert abs(plane_wave_bessel_expansion(k, r) - np.exp(1j * k @ r)) < 1e-10
