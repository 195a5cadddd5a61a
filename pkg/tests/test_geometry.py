import math

import numpy as np
import pytest

from photonsurf import (
    DomainError,
    IdentityNotApplicableError,
    MinimalSphereError,
    PhotonSurfaceSpec,
    StepControl,
    build_family,
    c_constant,
    custom_spacetime,
    integrate_profile,
    isotropic_profile_samples,
    isotropic_sphere_residual,
    isotropic_surface_residual,
    mass_flux,
    scalar_curvature_fd,
    slice_data,
    slice_identity_residual,
    surface_scalar_curvature_check,
    verification_suite,
    warped_product_metric,
    warped_scalar_curvature,
)

ALPHA_STAR = 1.0 / math.sqrt(27.0)


def test_slice_data_schwarzschild(schw3):
    d = slice_data(schw3, 4.0)
    assert d.lapse == pytest.approx(math.sqrt(0.5), rel=1e-15)
    assert d.mean_curvature == pytest.approx(math.sqrt(2) / 4, rel=1e-15)
    assert d.normal_lapse_derivative == pytest.approx(1 / 16, rel=1e-15)
    assert d.sphere_scalar_curvature == pytest.approx(0.125, rel=1e-15)


def test_slice_data_inside_horizon_rejected(schw3):
    with pytest.raises(DomainError):
        slice_data(schw3, 1.5)


# warped curvature formula validated against two independent oracles --------

def test_warped_curvature_de_sitter_oracle():
    # hyperboloid r(s) = cosh(alpha s)/alpha in Minkowski: R = n(n-1) alpha^2
    alpha = 0.5
    for n in (3, 4):
        s = np.linspace(-1.0, 1.0, 9)
        r = np.cosh(alpha * s) / alpha
        rdot = np.sinh(alpha * s)
        rddot = alpha * np.cosh(alpha * s)
        vals = warped_scalar_curvature(n, r, rdot, rddot)
        assert np.max(np.abs(vals - n * (n - 1) * alpha ** 2)) < 1e-12


def test_warped_curvature_finite_difference_oracle():
    alpha = 0.5

    def r_of_s(s):
        return math.cosh(alpha * s) / alpha

    for n, x in ((3, (0.3, 1.1, 0.7)), (4, (0.2, 1.2, 0.9, 0.4))):
        metric = warped_product_metric(n, r_of_s)
        fd = scalar_curvature_fd(metric, x, h=1e-3)
        closed = float(warped_scalar_curvature(
            n, r_of_s(x[0]), math.sinh(alpha * x[0]),
            alpha * math.cosh(alpha * x[0])))
        assert abs(fd - closed) < 1e-6
        assert abs(fd - n * (n - 1) * alpha ** 2) < 1e-6


def test_surface_scalar_curvature_on_photon_sphere(schw3):
    spec = PhotonSurfaceSpec(alpha=ALPHA_STAR, r0=3.0, span=(-1.0, 1.0))
    curve = integrate_profile(schw3, spec)
    rep = surface_scalar_curvature_check(schw3, curve, ALPHA_STAR)
    assert rep.expected == pytest.approx(2 / 9, rel=1e-12)
    assert rep.residual < 1e-8


def test_surface_scalar_curvature_ads_includes_lambda():
    st = build_family("schwarzschild-ads", n=3, m=1, L=10.0)
    r0 = 6.0
    alpha = 1.3 * math.sqrt(st.f(r0)) / r0
    spec = PhotonSurfaceSpec(alpha=alpha, r0=r0, sign=1, span=(-0.5, 0.5))
    curve = integrate_profile(st, spec, StepControl(sample_spacing=1e-3))
    rep = surface_scalar_curvature_check(st, curve, alpha)
    assert not rep.skipped
    assert rep.expected == pytest.approx(6 * alpha ** 2 - 2 * 3 / 100, rel=1e-12)
    assert rep.residual < 1e-5


def test_surface_scalar_curvature_skipped_for_unknown_lambda():
    st = custom_spacetime(lambda r: 1 - 2 / r, n=3, r_lo=2.0, r_hi=100.0)
    spec = PhotonSurfaceSpec(alpha=0.3, r0=5.0, sign=1, span=(-0.5, 0.5))
    curve = integrate_profile(st, spec)
    rep = surface_scalar_curvature_check(st, curve, 0.3)
    assert rep.skipped
    assert "Einstein constant" in rep.message


def test_slice_identity_vacuum(schw3):
    rng = np.random.default_rng(7)
    for n in (3, 4, 5, 6, 7):
        st = build_family("schwarzschild", n=n, m=1)
        lo = st.r_lo * 1.1
        for r in rng.uniform(lo, 50.0, 20):
            assert slice_identity_residual(st, float(r)) < 1e-10


def test_slice_identity_minkowski(minkowski):
    assert slice_identity_residual(minkowski, 2.0) < 1e-15


def test_slice_identity_rejects_non_vacuum():
    st = build_family("reissner-nordstrom", m=1, q=0.5)
    with pytest.raises(IdentityNotApplicableError):
        slice_identity_residual(st, 4.0)


def test_c_constant_schwarzschild(schw3):
    cc = c_constant(schw3, 4.0)
    assert cc.c == pytest.approx(1.0, abs=1e-14)
    assert cc.sphere_constraint_residual < 1e-12
    assert cc.lapse_constraint_residual < 1e-12


def test_c_constant_minkowski(minkowski):
    cc = c_constant(minkowski, 7.0)
    assert cc.c == pytest.approx(0.5, abs=1e-15)
    assert cc.sphere_constraint_residual < 1e-15


def test_c_constant_horizon_limit(schw3):
    with pytest.raises(DomainError):
        c_constant(schw3, 2.0)


def test_c_constant_minimal_sphere_detected():
    st = custom_spacetime(lambda r: 1e-30, n=3, r_lo=1.0, r_hi=10.0)
    with pytest.raises(MinimalSphereError):
        c_constant(st, 5.0)


def test_mass_flux_schwarzschild(schw3):
    assert mass_flux(schw3, 5.0) == pytest.approx(1.0, abs=1e-14)
    vals = [mass_flux(schw3, r) for r in (3.0, 7.0, 20.0)]
    assert max(vals) - min(vals) < 1e-12


def test_mass_flux_higher_dim_constant():
    st = build_family("schwarzschild", n=5, m=1)
    vals = [mass_flux(st, r) for r in np.geomspace(1.5, 40.0, 30)]
    assert np.std(vals) < 1e-10
    assert vals[0] == pytest.approx(3.0, abs=1e-12)  # (n-2) m


def test_mass_flux_minkowski(minkowski):
    assert mass_flux(minkowski, 9.0) == 0.0


def test_isotropic_sphere_residual(schw3_iso):
    s_star = 1 + math.sqrt(3) / 2
    assert isotropic_sphere_residual(schw3_iso, s_star) < 1e-8
    assert isotropic_sphere_residual(schw3_iso, 3.0) > 0.1


def test_isotropic_sphere_residual_minkowski(minkowski):
    from photonsurf import to_isotropic
    iso = to_isotropic(minkowski, r0=1.0)
    assert isotropic_sphere_residual(iso, 2.0) == pytest.approx(1.0, abs=1e-12)


def test_isotropic_surface_residual_constant_sample(schw3_iso):
    s_star = 1 + math.sqrt(3) / 2
    assert isotropic_surface_residual(schw3_iso, [(0.0, s_star, 0.0, 0.0)]) < 1e-8


def test_isotropic_surface_residual_mapped_curve(schw3, schw3_iso):
    spec = PhotonSurfaceSpec(alpha=0.25, r0=3.0, sign=1, span=(-2.0, 2.0))
    curve = integrate_profile(schw3, spec, StepControl(sample_spacing=2e-3))
    rows = isotropic_profile_samples(schw3_iso, curve)
    assert isotropic_surface_residual(schw3_iso, rows) < 1e-5


def test_verification_suite_passes_for_schwarzschild(schw3):
    checks = verification_suite(schw3)
    assert all(c["passed"] for c in checks)
    assert not any(c["skipped"] for c in checks)


def test_verification_suite_skips_for_non_vacuum():
    st = build_family("reissner-nordstrom", m=1, q=0.5)
    checks = verification_suite(st)
    assert all(c["passed"] for c in checks)
    assert any(c["skipped"] for c in checks)
