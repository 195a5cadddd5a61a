"""Null geodesics in class-S spacetimes via their conserved-charge reduction.

A null geodesic with energy E and total angular momentum ell obeys

    dt/ds = E / f(r),   (dr/ds)^2 = E^2 - ell^2 f(r) / r^2,

with the angular motion confined to a great circle, dphi/ds = ell / r^2.
The radial equation is integrated in its regularized second-order form
d^2r/ds^2 = (ell^2 / r^3) (f - r f'/2), smooth through turning points.
A geodesic with ell > 0 generates a photon surface of umbilicity factor
E/ell; the reparametrized profile serves as an independent oracle for the
surface integrator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ForbiddenRadiusError, PrincipalNullError
from .spacetime import ClassSSpacetime
from .surfaces import (
    ASYMPTOTE_EPS,
    CRITICAL_RTOL,
    PhotonSphere,
    ProfileCurve,
    StepControl,
    _integrate_halfline,
    find_photon_spheres,
)

__all__ = [
    "ConservedCharges",
    "NullGeodesicTrajectory",
    "integrate_null_geodesic",
    "umbilicity_from_charges",
    "generated_surface_profile",
    "critical_impact_parameter",
]


@dataclass(frozen=True)
class ConservedCharges:
    """Energy and total angular momentum of a null geodesic."""

    energy: float
    angular_momentum: float

    def __post_init__(self):
        if self.energy <= 0:
            raise ValueError("energy must be positive")
        if self.angular_momentum < 0:
            raise ValueError("angular momentum must be non-negative")

    @property
    def principal(self) -> bool:
        return self.angular_momentum == 0.0


@dataclass
class NullGeodesicTrajectory:
    """Affine-parameter samples of one null geodesic plus its charges."""

    s: np.ndarray
    t: np.ndarray
    r: np.ndarray
    phi: np.ndarray
    rdot: np.ndarray
    arclength: np.ndarray  # induced profile arclength of the generated surface
    charges: ConservedCharges
    termination: str = "span"
    termination_start: str = "span"
    null_residual: np.ndarray = field(default=None, repr=False)
    _dense: object = field(default=None, repr=False)


def umbilicity_from_charges(charges: ConservedCharges) -> float:
    """Umbilicity factor E/ell of the generated surface (requires ell > 0)."""
    if charges.principal:
        raise PrincipalNullError(
            "ell = 0 generates a principal null hypersurface, not a photon surface")
    return charges.energy / charges.angular_momentum


def critical_impact_parameter(st: ClassSSpacetime, sphere: PhotonSphere) -> float:
    """b_* = ell/E for geodesics asymptotic to the photon sphere."""
    return sphere.r_star / math.sqrt(st.f(sphere.r_star))


def _circular_trajectory(st, charges, r0, span, step):
    E, ell = charges.energy, charges.angular_momentum
    f0 = st.f(r0)
    lo, hi = span
    s = np.arange(0.0, hi + 0.5 * step.sample_spacing, step.sample_spacing)
    if lo < 0:
        back = -np.arange(step.sample_spacing, -lo + 0.5 * step.sample_spacing,
                          step.sample_spacing)
        s = np.concatenate([back[::-1], s])
    return NullGeodesicTrajectory(
        s=s, t=E / f0 * s, r=np.full_like(s, r0), phi=ell / r0 ** 2 * s,
        rdot=np.zeros_like(s), arclength=ell / r0 * s, charges=charges,
        termination="circular", termination_start="circular",
        null_residual=np.zeros_like(s))


def integrate_null_geodesic(st: ClassSSpacetime, charges: ConservedCharges,
                            r0: float, sign: int = 1,
                            span: tuple[float, float] = (0.0, 10.0),
                            step: StepControl = StepControl(),
                            spheres: list[PhotonSphere] | None = None
                            ) -> NullGeodesicTrajectory:
    """Integrate the reduced null-geodesic system over an affine span.

    ``sign`` is the initial sign of dr/ds; 0 is admitted only on a circular
    orbit or at a turning point.  Termination mirrors the profile integrator:
    span end, interval boundary, or photon-sphere asymptote.
    """
    E, ell = charges.energy, charges.angular_momentum
    if not st.contains(r0):
        raise ForbiddenRadiusError(f"r0 = {r0:.6g} outside radial interval")
    f0, df0 = st.metric(r0)
    disc = E ** 2 - ell ** 2 * f0 / r0 ** 2
    if disc < -1e-12 * E ** 2:
        raise ForbiddenRadiusError(
            f"E^2 = {E**2:.6g} < ell^2 f(r0)/r0^2 = {ell**2*f0/r0**2:.6g}: "
            "forbidden initial radius")

    if ell > 0 and spheres is None:
        spheres = find_photon_spheres(st)

    # exact circular orbit: turning point that is also a critical point;
    # data within the classification band of a photon sphere snaps to the
    # circular solution because the orbit is an unstable fixed point
    accel0 = (ell ** 2 / r0 ** 3) * (f0 - 0.5 * r0 * df0)
    if abs(disc) <= 1e-12 * E ** 2 and abs(accel0) <= 1e-12 * E ** 2 / r0:
        return _circular_trajectory(st, charges, r0, span, step)
    if ell > 0:
        alpha = E / ell
        for sp in spheres:
            if abs(alpha - sp.alpha_star) <= CRITICAL_RTOL * sp.alpha_star \
                    and abs(r0 - sp.r_star) <= 1e-9 * sp.r_star:
                return _circular_trajectory(st, charges, sp.r_star, span, step)
    if sign == 0 and disc > 1e-12 * E ** 2:
        raise ForbiddenRadiusError("sign = 0 is only valid at a turning point")

    def rhs(s, y):
        _, r, v, _, _ = y
        fv, dfv = st.metric(r)
        return (E / fv, v, (ell ** 2 / r ** 3) * (fv - 0.5 * r * dfv),
                ell / r ** 2, ell / r)

    events = []
    r_stop_lo = st.r_lo * (1 + 1e-9) if st.r_lo > 0 else 0.0

    def ev_low(s, y):
        return y[1] - r_stop_lo
    ev_low.terminal = True
    events.append((ev_low, "boundary"))
    if math.isfinite(st.r_hi):
        def ev_high(s, y):
            return st.r_hi * (1 - 1e-9) - y[1]
        ev_high.terminal = True
        events.append((ev_high, "boundary"))

    if ell > 0:
        alpha = E / ell
        for sp in spheres:
            if abs(alpha - sp.alpha_star) <= CRITICAL_RTOL * sp.alpha_star:
                def ev_asym(s, y, r_star=sp.r_star):
                    return (y[1] - r_star) ** 2 + y[2] ** 2 - ASYMPTOTE_EPS ** 2
                ev_asym.terminal = True
                events.append((ev_asym, "asymptotic-to-photon-sphere"))

    v0 = sign * math.sqrt(max(disc, 0.0))
    y0 = (0.0, r0, v0, 0.0, 0.0)
    s_lo, s_hi = span

    parts = []
    denses = []
    reason_fwd = reason_bwd = "span"
    if s_hi > 0:
        sol, reason_fwd = _integrate_halfline(rhs, y0, s_hi, step, events)
        denses.append(sol)
        s_samp = np.arange(0.0, sol.t[-1] + 0.5 * step.sample_spacing,
                           step.sample_spacing)
        s_samp = s_samp[s_samp <= sol.t[-1] + 1e-15]
        parts.append((s_samp, sol.sol(s_samp)))
    if s_lo < 0:
        sol, reason_bwd = _integrate_halfline(rhs, y0, s_lo, step, events)
        denses.append(sol)
        start = step.sample_spacing if parts else 0.0
        s_samp = -np.arange(start, -sol.t[-1] + 0.5 * step.sample_spacing,
                            step.sample_spacing)
        s_samp = s_samp[s_samp >= sol.t[-1] - 1e-15]
        parts.insert(0, (s_samp[::-1], sol.sol(s_samp[::-1])))

    if len(parts) == 2:
        (sb, yb), (sf, yf) = parts
        s = np.concatenate([sb, sf])
        y = np.concatenate([yb, yf], axis=1)
    else:
        s, y = parts[0]

    t, r, v, phi, sigma = y
    f = np.array([st.f(rr) for rr in r])
    # null residual: -f tdot^2 + rdot^2/f + r^2 phidot^2 with the reductions
    residual = np.abs((v ** 2 - (E ** 2 - ell ** 2 * f / r ** 2)) / f)
    return NullGeodesicTrajectory(
        s=s, t=t, r=r, phi=phi, rdot=v, arclength=sigma, charges=charges,
        termination=reason_fwd, termination_start=reason_bwd,
        null_residual=residual, _dense=denses)


def generated_surface_profile(traj: NullGeodesicTrajectory,
                              spacing: float = 1e-2,
                              st: ClassSSpacetime | None = None) -> ProfileCurve:
    """Project a trajectory to the unit-speed radial profile of its surface.

    Requires ell > 0.  The induced profile arclength satisfies
    d(sigma)/ds = ell / r, so the projected curve obeys the photon surface
    system with alpha = E/ell.  When ``st`` is given, the metric profile is
    evaluated from it; otherwise f is recovered from the null constraint
    f = (E^2 - rdot^2) r^2 / ell^2.
    """
    charges = traj.charges
    if charges.principal:
        raise PrincipalNullError("principal null geodesics generate null surfaces")
    E, ell = charges.energy, charges.angular_momentum
    alpha = E / ell

    def f_along(r, v):
        if st is not None:
            return np.array([st.f(rr) for rr in np.atleast_1d(r)])
        return (E ** 2 - np.asarray(v) ** 2) * np.asarray(r) ** 2 / ell ** 2

    if traj._dense is None:
        # analytic circular orbit: constant profile at the photon sphere
        sigma = traj.arclength
        r0 = float(traj.r[0])
        f0 = float(f_along(np.array([r0]), np.array([0.0]))[0])
        tdot = alpha * r0 / f0
        s = np.arange(sigma[0], sigma[-1] + 0.5 * spacing, spacing)
        return ProfileCurve(
            s=s, t=tdot * s, r=np.full_like(s, r0),
            tdot=np.full_like(s, tdot), rdot=np.zeros_like(s),
            alpha=alpha, termination=traj.termination,
            unit_residual=np.abs(np.full_like(s, f0 * tdot ** 2 - 1.0)))

    # invert sigma(s) on each dense piece via Newton (d sigma/ds = ell/r)
    samples_s = []
    samples_y = []
    for sol in traj._dense:
        s_end = sol.t[-1]
        sig_end = sol.sol(s_end)[4]
        direction = 1.0 if s_end >= 0 else -1.0
        sig_grid = np.arange(0.0, abs(sig_end) + 0.5 * spacing, spacing)
        sig_grid = direction * sig_grid[sig_grid <= abs(sig_end) + 1e-15]
        s_guess = 0.0
        ss = []
        for sig in sig_grid:
            s_cur = s_guess
            for _ in range(80):
                y = sol.sol(s_cur)
                resid = y[4] - sig
                stp = -resid * y[1] / ell
                # keep inside the integrated range
                s_new = min(max(s_cur + stp, min(0.0, s_end)), max(0.0, s_end))
                moved = abs(s_new - s_cur)
                s_cur = s_new
                if moved <= 1e-14 * max(1.0, abs(s_cur)):
                    break
            ss.append(s_cur)
            s_guess = s_cur
        ys = sol.sol(np.array(ss)) if ss else np.empty((5, 0))
        samples_s.append(np.array(sig_grid))
        samples_y.append(ys)

    if len(samples_s) == 2:
        sig = np.concatenate([samples_s[1][::-1][:-1], samples_s[0]])
        y = np.concatenate([samples_y[1][:, ::-1][:, :-1], samples_y[0]], axis=1)
    else:
        sig, y = samples_s[0], samples_y[0]

    t, r, v = y[0], y[1], y[2]
    # dt/dsigma = alpha r / f and dr/dsigma = (dr/ds) r / ell
    rdot = v * r / ell
    f = f_along(r, v)
    tdot = alpha * r / f
    unit = np.abs(f * tdot ** 2 - rdot ** 2 / f - 1.0)
    return ProfileCurve(s=sig, t=t, r=r, tdot=tdot, rdot=rdot, alpha=alpha,
                        termination=traj.termination,
                        termination_start=traj.termination_start,
                        unit_residual=unit)
