"""Command-line interface: ``sample``, ``verify``, ``spectrum`` and ``observables``.

Configuration is a flat ``key = value`` text file (``#`` starts a comment)
plus ``--param key=value`` overrides. Recognized keys:

=============  ==============================================================
beam           ``bessel`` (default), ``lg`` or ``near_axis``
k_perp, k_z    Bessel wavenumbers (defaults 1, 5)
m, sigma       azimuthal index and helicity (defaults 0, 1; near-axis m >= 1)
Omega, n, l    LG carrier, radial index, waist (defaults 10, 0, 1 natural;
               1e15 s^-1, 0, 1e-3 m with ``--si``)
x, y, z, t     grid axes for ``sample``: ``value`` or ``start:stop:count``
fd_h           relative finite-difference step (default 1e-3)
points         number of random verification points (default 20)
seed           random seed for verification points (default 1234)
omega_min/max  spectrum range (default Omega up to the 1 - 1e-10 weight quantile)
count          spectrum samples (default 4001)
cases          spectrum cases ``n,m;n,m;...`` (default ``0,0;1,1;2,2``)
=============  ==============================================================

Exit codes: 0 success, 1 verification or physics failure, 2 usage or
configuration error.
"""

import argparse
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .beams import (
    BesselBeamSpec,
    LGBeamSpec,
    bessel_field,
    bessel_rs_field,
    bessel_chi_field,
    lg_chi_field,
    lg_field,
    near_axis_chi_field,
    polarization_vector,
)
from .errors import DomainError, NonNormalizableError
from .fields import (
    NATURAL,
    SI,
    FDSpec,
    RSField,
    angular_momentum_density,
    energy_density,
    momentum_density,
    relative_dalembert_residual,
    relative_maxwell_residual,
    whittaker_field,
    whittaker_map,
)
from .momentum import (
    BesselAmplitude,
    LGAmplitude,
    expectation_energy,
    expectation_helicity,
    expectation_mz,
    expectation_pz,
    photon_norm,
)
from .operators import (
    apply_mz,
    apply_pperp2,
    apply_pz,
    conjugate_as_wavefunction,
    eigenvalue_estimate,
    helicity_residual,
)
from .spectrum import spectral_curve, spectral_quantile

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    values: dict = field(default_factory=dict)
    si: bool = False
    fd_order: int = 4
    tol: float = None
    out: str = None
    basis: str = "cartesian"
    corrupt_fz: bool = False

    @property
    def consts(self):
        return SI if self.si else NATURAL

    def get(self, key, default=None, kind=float):
        raw = self.values.get(key)
        if raw is None:
            return default
        try:
            return kind(raw)
        except ValueError as exc:
            raise UsageError(f"bad value for {key!r}: {raw!r}") from exc


def parse_config_text(text):
    """Parse ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected key = value")
        key, val = (part.strip() for part in line.split("=", 1))
        if not key:
            raise UsageError(f"config line {lineno}: empty key")
        out[key] = val
    return out


def _int(v):
    f = float(v)
    if f != int(f):
        raise ValueError(v)
    return int(f)


def _beam_kind(cfg):
    kind = cfg.values.get("beam", "bessel")
    if kind not in ("bessel", "lg", "near_axis"):
        raise UsageError(f"unknown beam {kind!r}")
    return kind


def _lg_defaults(cfg):
    return (1e15, 1e-3) if cfg.si else (10.0, 1.0)


def build_spec(cfg):
    kind = _beam_kind(cfg)
    m = cfg.get("m", 0, _int)
    sigma = cfg.get("sigma", 1, _int)
    if kind == "bessel":
        return kind, BesselBeamSpec(cfg.get("k_perp", 1.0), cfg.get("k_z", 5.0), m, sigma)
    if kind == "lg":
        Om, l0 = _lg_defaults(cfg)
        return kind, LGBeamSpec(cfg.get("Omega", Om), cfg.get("n", 0, _int), m, cfg.get("l", l0), sigma)
    m = cfg.get("m", 1, _int)
    near_axis_chi_field(cfg.get("k_z", 1.0), m, sigma)
    return kind, {"k_z": cfg.get("k_z", 1.0), "m": m, "sigma": sigma}


def _negate_z(f):
    sign = np.array([1.0, 1.0, -1.0])

    def jet(p):
        v, j, h = f.jet(p)
        return v * sign, j * sign[:, None], (None if h is None else h * sign[:, None, None])

    return RSField(lambda p: f.func(p) * sign, jet=jet if f.has_jet else None, meta={**f.meta, "corrupted": "F_z"})


def build_field(kind, spec, cfg):
    consts = cfg.consts
    if kind == "bessel":
        f = bessel_field(spec, consts)
    elif kind == "lg":
        f = lg_field(spec, consts)
    else:
        chi = near_axis_chi_field(spec["k_z"], spec["m"], spec["sigma"], consts)
        f = whittaker_field(chi, consts)
    return _negate_z(f) if cfg.corrupt_fz else f


def _scale(kind, spec, consts):
    """Characteristic wavenumber of the beam."""
    if kind == "bessel":
        return spec.k
    if kind == "lg":
        return spec.Omega / consts.c
    return abs(spec["k_z"])


def _axis(cfg, key, default):
    raw = cfg.values.get(key, default)
    parts = str(raw).split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            lo, hi, n = float(parts[0]), float(parts[1]), _int(parts[2])
            if n < 1:
                raise ValueError
            return np.linspace(lo, hi, n)
    except ValueError:
        pass
    raise UsageError(f"grid axis {key!r} must be 'value' or 'start:stop:count', got {raw!r}")


def _fmt(v):
    return "%.16e" % v


def _metadata(cfg, spec, extra=()):
    lines = [
        f"# rsbeams {__version__}",
        f"# constants: {cfg.consts.name} (c={_fmt(cfg.consts.c)}, hbar={_fmt(cfg.consts.hbar)}, eps0={_fmt(cfg.consts.eps0)})",
        f"# spec: {spec}",
    ]
    return lines + [f"# {e}" for e in extra]


def _write(path, lines):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def cmd_sample(cfg):
    kind, spec = build_spec(cfg)
    consts = cfg.consts
    axes = [_axis(cfg, k, "0") for k in "xyzt"]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 4)
    if cfg.basis == "cylindrical":
        if kind != "bessel":
            raise UsageError("cylindrical components are available for Bessel beams only")
        F = bessel_rs_field(spec, grid, consts, basis="cylindrical")
        Fc = bessel_rs_field(spec, grid, consts)
        names = ("rho", "phi", "z")
    else:
        Fc = F = build_field(kind, spec, cfg)(grid)
        names = ("x", "y", "z")
    if cfg.corrupt_fz and cfg.basis == "cylindrical":
        F = F * np.array([1.0, 1.0, -1.0])
        Fc = Fc * np.array([1.0, 1.0, -1.0])
    u = consts.name
    cols = ["x", "y", "z", "t"]
    for nm in names:
        cols += [f"re_F_{nm}", f"im_F_{nm}"]
    cols += ["energy_density", "momentum_density_x", "momentum_density_y", "momentum_density_z", "angular_momentum_density_z"]
    w = energy_density(Fc)
    g = momentum_density(Fc, consts)
    jz = angular_momentum_density(Fc, grid[:, :3], consts)[:, 2]
    lines = _metadata(cfg, spec, [f"units: {u}; F in sqrt(eps0)*field units, densities per unit volume", f"basis: {cfg.basis}"])
    lines.append(",".join(cols))
    for i in range(len(grid)):
        row = list(grid[i])
        for c in range(3):
            row += [F[i, c].real, F[i, c].imag]
        row += [w[i], g[i, 0], g[i, 1], g[i, 2], jz[i]]
        lines.append(",".join(_fmt(v) for v in row))
    out = cfg.out or "sample.csv"
    _write(out, lines)
    print(f"wrote {len(grid)} rows to {out} (constants: {u})")
    return EXIT_OK


def _random_points(kind, spec, cfg, count, rng):
    consts = cfg.consts
    if kind == "lg":
        L = spec.l
        T = spec.l**2 * spec.Omega / consts.c**2
        # keep the carrier phase Omega t, Omega z / c modest: rounding of a
        # large phase is amplified by 1/(k h)^2 in second differences
        Z = min(1.5 * L, 100 * consts.c / spec.Omega)
        xy = rng.uniform(-1.5 * L, 1.5 * L, (count, 2))
        xyz = np.column_stack([xy, rng.uniform(-Z, Z, count)])
        t = rng.uniform(-1, 1, count) * min(0.5 * T, 100 / spec.Omega)
    else:
        L = 3.0 / _scale(kind, spec, consts)
        xyz = rng.uniform(-L, L, (count, 3))
        t = rng.uniform(-L / consts.c, L / consts.c, count)
    return np.column_stack([xyz, t])


def _fd(kind, spec, cfg, rel=None):
    k = _scale(kind, spec, cfg.consts)
    rel = cfg.get("fd_h", 1e-3) if rel is None else rel
    if kind == "lg":
        # the transverse scale l can be far larger than the carrier wavelength
        hz = rel / k
        return FDSpec(h=(rel * spec.l, rel * spec.l, hz, hz / cfg.consts.c), order=cfg.fd_order)
    return FDSpec.for_wavenumber(k, cfg.consts.c, rel=rel, order=cfg.fd_order)


def _slope(f, pts, kind, spec, cfg):
    """Convergence order and residuals of the FD Maxwell check over steps k h in {0.2, 0.1, 0.05}."""
    rels = np.array([0.2, 0.1, 0.05])
    res = [float(np.max(relative_maxwell_residual(f, pts, cfg.consts, _fd(kind, spec, cfg, r)))) for r in rels]
    return float(np.polyfit(np.log(rels), np.log(res), 1)[0]), res


def run_checks(cfg):
    """Run the verification suite; returns a list of ``(name, value, tol, passed)``."""
    kind, spec = build_spec(cfg)
    consts = cfg.consts
    rng = np.random.default_rng(cfg.get("seed", 1234, _int))
    pts = _random_points(kind, spec, cfg, cfg.get("points", 20, _int), rng)
    f = build_field(kind, spec, cfg)
    fd = _fd(kind, spec, cfg)
    order = cfg.fd_order
    tol = cfg.tol if cfg.tol is not None else (1e-8 if order == 4 else 1e-4)
    if kind == "lg":
        tol = cfg.tol if cfg.tol is not None else (1e-6 if order == 4 else 1e-3)
    checks = []

    def add(name, value, limit, ok=None):
        checks.append((name, float(value), float(limit), bool(value < limit) if ok is None else ok))

    add(f"maxwell_residual (order {order})", np.max(relative_maxwell_residual(f, pts, consts, fd)), tol)
    slope, res = _slope(f, pts[:5], kind, spec, cfg)
    if max(res) < 1e-10:
        # z and t difference errors cancel for a pure plane factor in z - ct,
        # leaving only roundoff, so there is no slope to measure
        add("fd_truncation_free", max(res), 1e-10)
        print(f"  FD residual is roundoff-limited ({max(res):.2e}) at every step; no convergence slope")
    else:
        add(f"convergence_slope (order {order})", abs(slope - order), 0.3)
        print(f"  measured convergence slope: {slope:.3f} (nominal {order})")

    if kind == "bessel":
        chi = bessel_chi_field(spec, consts)
        add("dalembert_residual", np.max(relative_dalembert_residual(chi, pts, consts, fd)), tol)
        # closed form against second differences of the scalar, at a step
        # where truncation and roundoff are balanced for a second derivative
        got = whittaker_map(chi, pts, consts, _fd(kind, spec, cfg, 1e-2))
        ref = f(pts)
        add("whittaker_consistency", np.max(np.abs(got - ref)) / np.max(np.abs(ref)), tol)
        psi = f if spec.sigma == 1 else conjugate_as_wavefunction(f)
        F = psi(pts)
        hb = consts.hbar
        for name, OF, ev in (
            ("eigen_pz", apply_pz(psi, pts, consts), hb * spec.k_z),
            ("eigen_pperp2", apply_pperp2(psi, pts, consts), hb**2 * spec.k_perp**2),
            ("eigen_mz", apply_mz(psi, pts, consts), hb * spec.m),
        ):
            est = eigenvalue_estimate(F, OF)
            add(name, abs(est.rayleigh - ev) / max(abs(ev), hb * spec.k), 1e-6)
        r = helicity_residual(psi, pts, spec.k, spec.sigma)
        add("helicity_residual", np.max(np.linalg.norm(r, axis=-1)) / (spec.k * np.max(np.linalg.norm(F, axis=-1))), 1e-6)
    elif kind == "lg":
        chi = lg_chi_field(spec, consts)
        add("dalembert_residual", np.max(relative_dalembert_residual(chi, pts, consts, fd)), tol)
        F = f(pts)
        got = whittaker_map(chi, pts, consts, _fd(kind, spec, cfg, 1e-2))
        add("whittaker_consistency", np.max(np.abs(got - F)) / np.max(np.abs(F)), tol)
        est = eigenvalue_estimate(F, apply_mz(f, pts, consts, fd))
        ev = consts.hbar * spec.sigma * spec.m
        # derivatives of F are finite differences here, so the tolerance follows the stencil
        add("eigen_mz", abs(est.rayleigh - ev) / consts.hbar, tol)
    else:
        chi = near_axis_chi_field(spec["k_z"], spec["m"], spec["sigma"], consts)
        add("dalembert_residual", np.max(relative_dalembert_residual(chi, pts, consts, fd)), 1e-8)

    k = rng.normal(size=(200, 3))
    e = polarization_vector(k)
    n = k / np.linalg.norm(k, axis=-1, keepdims=True)
    add("polarization_cross", np.max(np.abs(np.cross(n, e) + 1j * e)), 1e-12)
    lhs = e[:, :, None] * np.conj(e)[:, None, :] - np.conj(e)[:, :, None] * e[:, None, :]
    eps = np.zeros((3, 3, 3))
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[a, b, c], eps[a, c, b] = 1.0, -1.0
    # with n x e = -i e the antisymmetric product is -i eps_ijk n_k
    rhs = -1j * np.einsum("ijk,nk->nij", eps, n)
    add("polarization_antisymmetric_product", np.max(np.abs(lhs - rhs)), 1e-12)
    return checks


def cmd_verify(cfg):
    print(f"constants preset: {cfg.consts.name}")
    checks = run_checks(cfg)
    width = max(len(c[0]) for c in checks)
    for name, value, limit, ok in checks:
        print(f"{name:<{width}}  {value:.3e}  (tol {limit:.1e})  {'PASS' if ok else 'FAIL'}")
    failed = [c[0] for c in checks if not c[3]]
    if failed:
        print("failed: " + ", ".join(failed))
        return EXIT_FAIL
    print("all checks passed")
    return EXIT_OK


def _cases(cfg):
    raw = cfg.values.get("cases", "0,0;1,1;2,2")
    try:
        return [tuple(_int(v) for v in part.split(",")) for part in raw.split(";") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"cases must look like 'n,m;n,m', got {raw!r}") from exc


def cmd_spectrum(cfg):
    consts = cfg.consts
    Om0, l0 = _lg_defaults(cfg)
    Om = cfg.get("Omega", Om0)
    lw = cfg.get("l", l0)
    sigma = cfg.get("sigma", 1, _int)
    cases = _cases(cfg)
    lo = cfg.get("omega_min", Om)
    # default upper end leaves a weight below 1e-10 beyond it for every case
    tail = max(spectral_quantile(LGBeamSpec(Om, n, m, lw, sigma), 1 - 1e-10, consts) for n, m in cases)
    hi = cfg.get("omega_max", tail)
    count = cfg.get("count", 4001, _int)
    outdir = cfg.out or "."
    try:
        os.makedirs(outdir, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create {outdir}: {exc}") from exc
    for n, m in cases:
        spec = LGBeamSpec(Om, n, m, lw, sigma)
        curve = spectral_curve(spec, (lo, hi), count, consts)
        lines = _metadata(cfg, spec, [f"normalization constant: {_fmt(curve.norm_const)}", "omega in 1/time, w in time"])
        lines.append("omega,w")
        lines += [f"{_fmt(a)},{_fmt(b)}" for a, b in zip(curve.omega, curve.w)]
        path = os.path.join(outdir, f"spectrum_n{n}_m{m}.csv")
        _write(path, lines)
        print(f"n={n} m={m}: peak {curve.peak_height:.6e} at omega={curve.peak_omega:.10e}, "
              f"trapezoid integral {curve.integral():.8f} -> {path}")
    return EXIT_OK


def cmd_observables(cfg):
    kind, spec = build_spec(cfg)
    consts = cfg.consts
    print(f"constants preset: {consts.name}")
    if kind != "lg":
        amp = BesselAmplitude(spec) if kind == "bessel" else None
        try:
            if amp is None:
                raise NonNormalizableError("the near-axis limit has no normalizable amplitude")
            photon_norm(amp)
        except NonNormalizableError as exc:
            print(f"observables undefined: {exc}")
            return EXIT_FAIL
    amp = LGAmplitude(spec, consts)
    hb = consts.hbar
    norm = photon_norm(amp, consts)
    H = expectation_energy(amp, consts)
    pz = expectation_pz(amp, consts)
    mz = expectation_mz(amp, consts)
    lam = expectation_helicity(amp, consts)
    print(f"norm (shell regularization)  {_fmt(norm)}")
    print(f"<H>                          {_fmt(H)}")
    print(f"<p_z>                        {_fmt(pz)}")
    print(f"<M_z>                        {_fmt(mz)}")
    print(f"<Lambda>                     {_fmt(lam)}")
    print(f"<M_z>/hbar                   {_fmt(mz / hb)}  (m = {spec.m}, deviation {abs(mz / hb - spec.m):.3e})")
    print(f"<H> >= hbar Omega            {H >= hb * spec.Omega * (1 - 1e-14)}")
    return EXIT_OK


COMMANDS = {"sample": cmd_sample, "verify": cmd_verify, "spectrum": cmd_spectrum, "observables": cmd_observables}


def build_parser():
    parser = argparse.ArgumentParser(prog="rsbeams", description="Exact angular-momentum beams: sampling and verification.")
    parser.add_argument("--version", action="version", version=f"rsbeams {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", metavar="PATH", help="flat key=value configuration file")
        p.add_argument("--param", "-p", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
        p.add_argument("--si", action="store_true", help="use SI constants instead of natural units")
        p.add_argument("--fd-order", type=int, choices=(2, 4), default=4)
        p.add_argument("--tol", type=float, help="residual tolerance for verify")
        p.add_argument("--out", metavar="PATH", help="output file (sample) or directory (spectrum)")
        p.add_argument("--basis", choices=("cartesian", "cylindrical"), default="cartesian")
        p.add_argument("--corrupt-fz", action="store_true", help="negate F_z (fault injection for verify)")
    return parser


def load_config(args):
    values = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                values.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    for item in args.param:
        if "=" not in item:
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        key, val = item.split("=", 1)
        values[key.strip()] = val.strip()
    if args.tol is not None and not (args.tol > 0 and math.isfinite(args.tol)):
        raise UsageError("--tol must be positive")
    return RunConfig(values, args.si, args.fd_order, args.tol, args.out, args.basis, args.corrupt_fz)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except (UsageError, DomainError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
