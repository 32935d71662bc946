import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rsbeams.beams import BesselBeamSpec, bessel_field, polarization_vector
from rsbeams.errors import DomainError, SingularDirectionError
from rsbeams.fields import SI, FDSpec, RSField, curl_from_jacobian, field_jacobian
from rsbeams.operators import (
    GAUGES,
    MomentumAmplitude,
    apply_mz,
    apply_pperp2,
    apply_pz,
    conjugate_as_wavefunction,
    curl_via_spin,
    eigenvalue_estimate,
    helicity_residual,
    momentum_commutator_xy,
    momentum_helicity,
    momentum_mx_my,
    momentum_mz,
    momentum_operator,
    spin_matrices,
)

S = spin_matrices()
unit_vectors = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(
    lambda v: np.linalg.norm(v) > 1e-3
)


def const_field(v):
    v = np.asarray(v, dtype=complex)
    return RSField(lambda p: np.broadcast_to(v, p.shape[:-1] + (3,)).copy())


def bessel_wavefunction(spec):
    f = bessel_field(spec)
    return f if spec.sigma == 1 else conjugate_as_wavefunction(f)


def random_points(rng, n=30, L=3.0):
    return rng.uniform(-L, L, (n, 4))


# spin algebra


def test_spin_commutators():
    sx, sy, sz = S
    for a, b, c in ((sx, sy, sz), (sy, sz, sx), (sz, sx, sy)):
        assert np.max(np.abs(a @ b - b @ a - 1j * c)) < 1e-14


def test_sz_spectrum():
    assert np.allclose(np.sort(np.linalg.eigvalsh(S.sz)), [-1, 0, 1], atol=1e-15)


def test_spin_matrices_are_read_only():
    with pytest.raises(ValueError):
        S.sx[0, 0] = 1.0


@given(unit_vectors)
def test_spin_projection_cubed(v):
    n = np.asarray(v) / np.linalg.norm(v)
    sn = S.dot(n)
    assert np.max(np.abs(sn @ sn @ sn - sn)) < 1e-14


# position-space operators


def test_curl_via_spin_examples(rng):
    p = random_points(rng, 5)
    assert np.all(curl_via_spin(const_field([1, 2, 3]), p, FDSpec()) == 0)
    f = RSField(lambda q: np.stack([0 * q[..., 0], 0 * q[..., 0], q[..., 0]], axis=-1) + 0j)
    assert np.allclose(curl_via_spin(f, p, FDSpec()), [0, -1, 0], atol=1e-12)


@pytest.mark.parametrize("m", [0, 2, -3])
def test_curl_via_spin_matches_direct_curl(m, rng):
    spec = BesselBeamSpec(1.0, 5.0, m, 1)
    f = bessel_field(spec)
    p = random_points(rng)
    fd = FDSpec.for_wavenumber(spec.k)
    _, jac = field_jacobian(f, p, fd)
    assert np.max(np.abs(curl_via_spin(f, p, fd) - curl_from_jacobian(jac))) < 1e-12


def test_plane_wave_momentum(rng):
    k = np.array([0.4, -1.1, 2.3])
    e = polarization_vector(k)
    w = np.linalg.norm(k)
    f = RSField(lambda q: e * np.exp(1j * (q[..., :3] @ k - w * q[..., 3]))[..., None])
    p = random_points(rng, 10)
    F = f(p)
    assert np.allclose(apply_pz(f, p, fd=FDSpec.for_wavenumber(w)), k[2] * F, rtol=1e-9, atol=1e-9)
    assert np.allclose(apply_pperp2(f, p, fd=FDSpec.for_wavenumber(w, rel=1e-2)), (k[0] ** 2 + k[1] ** 2) * F, atol=1e-7)


def test_operators_annihilate_constants(rng):
    p = random_points(rng, 5)
    f = const_field([1, 2j, 3])
    assert np.all(apply_pz(f, p, fd=FDSpec()) == 0)
    assert np.all(apply_pperp2(f, p, fd=FDSpec()) == 0)
    assert np.all(apply_mz(const_field([0, 0, 1]), p, fd=FDSpec()) == 0)


def test_mz_of_orbital_vortex(rng):
    def func(q):
        rho = np.hypot(q[..., 0], q[..., 1])
        return np.stack([0 * rho, 0 * rho, (q[..., 0] + 1j * q[..., 1]) / rho], axis=-1)

    f = RSField(func)
    p = random_points(rng, 10) + np.array([4.0, 0, 0, 0])
    assert np.allclose(apply_mz(f, p, fd=FDSpec()), f(p), atol=1e-10)


def test_mz_units_follow_hbar(rng):
    spec = BesselBeamSpec(1.0, 2.0, 2, 1)
    f = bessel_field(spec)
    p = random_points(rng, 5)
    assert np.allclose(apply_mz(f, p, SI), SI.hbar * apply_mz(f, p), rtol=1e-14, atol=0)


@pytest.mark.parametrize("m", [0, 1, 2, 5, -2])
@pytest.mark.parametrize("sigma", [1, -1])
def test_bessel_eigenvalues_with_analytic_derivatives(m, sigma, rng):
    spec = BesselBeamSpec(1.0, 5.0, m, sigma)
    psi = bessel_wavefunction(spec)
    p = random_points(rng)
    F = psi(p)
    for OF, ev in (
        (apply_pz(psi, p), spec.k_z),
        (apply_pperp2(psi, p), spec.k_perp**2),
        (apply_mz(psi, p), m),
    ):
        est = eigenvalue_estimate(F, OF)
        assert abs(est.rayleigh - ev) <= 1e-6 * max(abs(ev), 1.0)
        good = ~est.low_norm
        assert np.max(np.abs(est.pointwise[good] - ev)) <= 1e-6 * max(abs(ev), 1.0)
    res = helicity_residual(psi, p, spec.k, sigma)
    assert np.max(np.linalg.norm(res, axis=-1)) <= 1e-6 * spec.k * np.max(np.linalg.norm(F, axis=-1))


@pytest.mark.parametrize("sigma", [1, -1])
def test_bessel_eigenvalues_with_finite_differences(sigma, rng):
    spec = BesselBeamSpec(1.0, 5.0, 2, sigma)
    psi = conjugate_as_wavefunction(RSField(bessel_field(spec).func)) if sigma == -1 else RSField(bessel_field(spec).func)
    p = random_points(rng, 20)
    F = psi(p)
    fd = FDSpec.for_wavenumber(spec.k)
    assert abs(eigenvalue_estimate(F, apply_pz(psi, p, fd=fd)).rayleigh - 5.0) < 1e-4 * 5
    assert abs(eigenvalue_estimate(F, apply_pperp2(psi, p, fd=FDSpec.for_wavenumber(spec.k, rel=1e-2))).rayleigh - 1.0) < 1e-4
    assert abs(eigenvalue_estimate(F, apply_mz(psi, p, fd=fd)).rayleigh - 2.0) < 1e-4 * 2


def test_helicity_discriminates_sign(rng):
    spec = BesselBeamSpec(1.0, 5.0, 1, -1)
    f = bessel_field(spec)
    p = random_points(rng, 10)
    scale = spec.k * np.max(np.linalg.norm(f(p), axis=-1))
    assert np.max(np.linalg.norm(helicity_residual(f, p, spec.k, -1), axis=-1)) < 1e-6 * scale
    assert np.max(np.linalg.norm(helicity_residual(f, p, spec.k, 1), axis=-1)) > 0.5 * scale


def test_static_field_is_not_a_helicity_state():
    res = helicity_residual(const_field([1, 0, 0]), np.zeros(4), 2.0, 1, fd=FDSpec())
    assert np.allclose(res, [-2.0, 0, 0])
    with pytest.raises(DomainError):
        helicity_residual(const_field([1, 0, 0]), np.zeros(4), 0.0, 1)


def test_eigenvalue_estimate_flags_zeros():
    F = np.array([[1.0, 0, 0], [1e-14, 0, 0]])
    est = eigenvalue_estimate(F, 3 * F)
    assert est.rayleigh == pytest.approx(3.0)
    assert est.low_norm.tolist() == [False, True] and np.isnan(est.pointwise[1])


def test_conjugation_carries_jet(rng):
    f = bessel_field(BesselBeamSpec(1.0, 2.0, 1, -1))
    g = conjugate_as_wavefunction(f)
    p = random_points(rng, 3)
    assert g.has_jet and np.allclose(g(p), np.conj(f(p)))
    assert np.allclose(g.jet(p)[1], np.conj(f.jet(p)[1]))


# momentum space


def vortex(m, helicity=1, width=1.0):
    def func(k):
        kx, ky, kz = k[..., 0], k[..., 1], k[..., 2]
        kp2 = kx * kx + ky * ky
        return (kx + 1j * ky) ** m * np.exp(-(kp2 + (kz - 2.0) ** 2) / width)

    return MomentumAmplitude(func, helicity)


def gaussian(helicity=1):
    return MomentumAmplitude(lambda k: np.exp(-np.sum((k - np.array([0.3, -0.2, 1.5])) ** 2, axis=-1)), helicity)


K_POINTS = np.array([[0.7, 0.2, 1.3], [-0.4, 0.9, 2.2], [0.3, -1.1, 0.5], [1.2, 0.4, -0.8]])


@pytest.mark.parametrize("m", [0, 1, 3])
def test_momentum_mz_whittaker(m):
    amp = vortex(m)
    assert np.allclose(momentum_mz(amp, K_POINTS), m * amp(K_POINTS), rtol=1e-8, atol=1e-12)


@pytest.mark.parametrize("m", [0, 1, 3])
@pytest.mark.parametrize("helicity", [1, -1])
def test_momentum_mz_alternate(m, helicity):
    amp = vortex(m, helicity)
    got = momentum_mz(amp, K_POINTS, gauge="alternate")
    assert np.allclose(got, (m + helicity) * amp(K_POINTS), rtol=1e-8, atol=1e-12)


@pytest.mark.parametrize("m", [1, 2, 4])
def test_total_mz_is_gauge_covariant(m):
    wh = momentum_mz(vortex(m), K_POINTS) / vortex(m)(K_POINTS)
    alt = momentum_mz(vortex(m - 1), K_POINTS, gauge="alternate") / vortex(m - 1)(K_POINTS)
    assert np.allclose(wh, alt, rtol=1e-8)


def test_momentum_mz_of_axisymmetric_amplitude():
    amp = MomentumAmplitude(lambda k: np.exp(-(k[..., 0] ** 2 + k[..., 1] ** 2) - k[..., 2] ** 2))
    assert np.allclose(momentum_mz(amp, K_POINTS), 0, atol=1e-10)


def test_spherical_amplitude_leaves_only_gauge_terms():
    amp = MomentumAmplitude(lambda k: np.exp(-np.sum(k * k, axis=-1)), -1)
    mx, my = momentum_mx_my(amp, K_POINTS)
    kx, ky, kz = K_POINTS.T
    kk = np.linalg.norm(K_POINTS, axis=-1)
    kp2 = kx**2 + ky**2
    psi = amp(K_POINTS)
    assert np.allclose(mx, -kk * kx / kp2 * psi, rtol=1e-8)
    assert np.allclose(my, -kk * ky / kp2 * psi, rtol=1e-8)


@pytest.mark.parametrize("gauge", GAUGES)
@pytest.mark.parametrize("amp", [gaussian(1), gaussian(-1), vortex(2, 1), vortex(1, -1)])
def test_angular_momentum_closure(gauge, amp):
    res, scale = momentum_commutator_xy(amp, K_POINTS, gauge)
    # M_z psi can vanish identically (alternate gauge, m = 1, helicity -1)
    ref = np.maximum(scale, np.abs(amp(K_POINTS)))
    assert np.max(np.abs(res) / ref) < 1e-5


@pytest.mark.parametrize("gauge", GAUGES)
@pytest.mark.parametrize("helicity", [1, -1])
def test_momentum_helicity(gauge, helicity):
    amp = vortex(2, helicity)
    got = momentum_helicity(amp, K_POINTS, gauge)
    assert np.allclose(got, helicity * amp(K_POINTS), rtol=1e-7, atol=1e-12)


def test_singular_directions():
    amp = gaussian()
    with pytest.raises(SingularDirectionError):
        momentum_mx_my(amp, np.array([[0.0, 0.0, 1.0]]))
    # the alternate gauge is regular on the forward axis but not on the backward ray
    mx, my = momentum_mx_my(amp, np.array([[0.0, 0.0, 1.0]]), gauge="alternate")
    assert np.isfinite(mx).all() and np.isfinite(my).all()
    with pytest.raises(SingularDirectionError):
        momentum_mx_my(amp, np.array([[0.0, 0.0, -1.0]]), gauge="alternate")


def test_unknown_gauge():
    with pytest.raises(ValueError):
        momentum_operator(gaussian(), "z", gauge="coulomb")
    with pytest.raises(DomainError):
        MomentumAmplitude(lambda k: k[..., 0], helicity=0)
