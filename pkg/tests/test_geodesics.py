import math

import numpy as np
import pytest

from photonsurf import (
    ConservedCharges,
    ForbiddenRadiusError,
    PhotonSurfaceSpec,
    PrincipalNullError,
    critical_impact_parameter,
    generated_surface_profile,
    integrate_null_geodesic,
    integrate_profile,
    umbilicity_from_charges,
)

ALPHA_STAR = 1.0 / math.sqrt(27.0)


def test_charges_validation():
    with pytest.raises(ValueError):
        ConservedCharges(energy=0.0, angular_momentum=1.0)
    with pytest.raises(ValueError):
        ConservedCharges(energy=1.0, angular_momentum=-1.0)
    assert ConservedCharges(energy=1.0, angular_momentum=0.0).principal


def test_umbilicity_factor():
    ch = ConservedCharges(energy=0.3, angular_momentum=1.5)
    assert umbilicity_from_charges(ch) == pytest.approx(0.2, rel=1e-15)
    with pytest.raises(PrincipalNullError):
        umbilicity_from_charges(ConservedCharges(energy=1.0, angular_momentum=0.0))


def test_critical_impact_parameter_schwarzschild(schw3, schw3_spheres):
    b = critical_impact_parameter(schw3, schw3_spheres[0])
    assert b == pytest.approx(3 * math.sqrt(3), abs=1e-12)


def test_critical_impact_parameter_schwarzschild_n4():
    from photonsurf import build_family, find_photon_spheres
    st = build_family("schwarzschild", n=4, m=1)
    sp = find_photon_spheres(st)[0]
    assert sp.r_star == pytest.approx(2.0, abs=1e-12)
    assert critical_impact_parameter(st, sp) == pytest.approx(2 * math.sqrt(2), abs=1e-12)


def test_null_constraint_preserved(schw3):
    ch = ConservedCharges(energy=0.3, angular_momentum=1.0)
    traj = integrate_null_geodesic(schw3, ch, 4.0, sign=1, span=(-10.0, 10.0))
    assert np.max(traj.null_residual) < 1e-10
    assert np.all(np.diff(traj.s) > 0)


def test_radial_geodesic(schw3):
    ch = ConservedCharges(energy=1.0, angular_momentum=0.0)
    traj = integrate_null_geodesic(schw3, ch, 4.0, sign=-1, span=(0.0, 10.0))
    assert traj.termination == "boundary"
    assert np.all(np.diff(traj.r) < 0)
    assert np.max(np.abs(traj.phi)) == 0.0


def test_forbidden_initial_radius(schw3):
    ch = ConservedCharges(energy=0.1, angular_momentum=1.0)
    # E^2 < f/r^2 * ell^2 near the potential peak
    with pytest.raises(ForbiddenRadiusError):
        integrate_null_geodesic(schw3, ch, 3.0)


def test_circular_orbit_snaps(schw3):
    ch = ConservedCharges(energy=ALPHA_STAR, angular_momentum=1.0)
    traj = integrate_null_geodesic(schw3, ch, 3.0, span=(-30.0, 30.0))
    assert traj.termination == "circular"
    assert np.max(np.abs(traj.r - 3.0)) == 0.0
    # affine rates: dt/ds = E/f, dphi/ds = ell/r^2
    f = 1 / 3
    assert np.allclose(traj.t, ALPHA_STAR / f * traj.s, atol=1e-12)
    assert np.allclose(traj.phi, traj.s / 9.0, atol=1e-12)


def test_turning_point_start_with_zero_sign(schw3):
    # r0 on the turning radius of E/ell = 0.15
    r_turn = 5.243216941077511
    ch = ConservedCharges(energy=0.15, angular_momentum=1.0)
    traj = integrate_null_geodesic(schw3, ch, r_turn, sign=0, span=(-5.0, 5.0))
    assert traj.r.min() == pytest.approx(r_turn, abs=1e-9)


def test_generated_surface_matches_profile(schw3, schw3_spheres):
    ch = ConservedCharges(energy=0.15, angular_momentum=1.0)
    traj = integrate_null_geodesic(schw3, ch, 6.0, sign=1, span=(-25.0, 25.0),
                                   spheres=schw3_spheres)
    prof = generated_surface_profile(traj, st=schw3)
    spec = PhotonSurfaceSpec(alpha=0.15, r0=6.0, sign=1, span=(-5.0, 5.0))
    curve = integrate_profile(schw3, spec, spheres=schw3_spheres)
    r_interp = np.interp(curve.s, prof.s, prof.r)
    t_interp = np.interp(curve.s, prof.s, prof.t)
    mask = (curve.s > prof.s[0]) & (curve.s < prof.s[-1])
    assert np.max(np.abs(r_interp[mask] - curve.r[mask])) < 1e-8
    assert np.max(np.abs(t_interp[mask] - curve.t[mask])) < 1e-8
    assert np.max(prof.unit_residual) < 1e-9


def test_generated_surface_requires_angular_momentum(schw3):
    ch = ConservedCharges(energy=1.0, angular_momentum=0.0)
    traj = integrate_null_geodesic(schw3, ch, 4.0, sign=1, span=(0.0, 5.0))
    with pytest.raises(PrincipalNullError):
        generated_surface_profile(traj)


def test_generated_surface_from_circular_orbit(schw3):
    ch = ConservedCharges(energy=ALPHA_STAR, angular_momentum=1.0)
    traj = integrate_null_geodesic(schw3, ch, 3.0, span=(0.0, 30.0))
    prof = generated_surface_profile(traj, st=schw3)
    assert np.max(np.abs(prof.r - 3.0)) == 0.0
    assert np.max(prof.unit_residual) < 1e-12


def test_asymptotic_geodesic_terminates(schw3, schw3_spheres):
    # lambda = E/ell exactly critical but started off the sphere
    ch = ConservedCharges(energy=ALPHA_STAR, angular_momentum=1.0)
    traj = integrate_null_geodesic(schw3, ch, 2.5, sign=1, span=(0.0, 2000.0),
                                   spheres=schw3_spheres)
    assert traj.termination == "asymptotic-to-photon-sphere"
    assert abs(traj.r[-1] - 3.0) < 1e-4
