"""Spherically symmetric photon surfaces: spheres, profile curves, classification.

A photon surface with umbilicity factor alpha has an arclength-parametrized
radial profile (t(s), r(s)) obeying

    dt/ds = alpha r / f(r),      (dr/ds)^2 = alpha^2 r^2 - f(r),

with the conserved quantity f(r) dt/ds / r = alpha and unit-speed condition
f (dt/ds)^2 - (dr/ds)^2 / f = 1.  The radial equation is integrated in its
regularized second-order form d^2r/ds^2 = alpha^2 r - f'(r)/2, which is
smooth through turning points and preserves both conservation laws exactly
at the level of the continuous flow.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import ForbiddenRadiusError, StepUnderflowError
from .spacetime import ClassSSpacetime

__all__ = [
    "PhotonSurfaceSpec",
    "ProfileCurve",
    "PhotonSphere",
    "SurfaceKind",
    "SurfaceClass",
    "StepControl",
    "find_photon_spheres",
    "profile_slope_squared",
    "turning_points",
    "integrate_profile",
    "ode_residuals",
    "ResidualReport",
    "classify",
    "minkowski_exact",
]

PHOTON_SPHERE_XTOL = 1e-13
CRITICAL_RTOL = 1e-8
# closest approach to the unstable fixed point that adaptive stepping can
# resolve before amplified roundoff ejects the trajectory
ASYMPTOTE_EPS = 1e-5


@dataclass(frozen=True)
class PhotonSurfaceSpec:
    """Initial data for one spherically symmetric photon surface."""

    alpha: float
    r0: float
    t0: float = 0.0
    sign: int = 1
    span: tuple[float, float] = (0.0, 10.0)

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("umbilicity factor alpha must be positive")
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if self.span[0] > 0 or self.span[1] < 0:
            raise ValueError("arclength span must contain 0")


@dataclass(frozen=True)
class StepControl:
    """Adaptive step control and output sampling for the integrators."""

    rtol: float = 1e-12
    atol: float = 1e-13
    sample_spacing: float = 1e-2
    max_step: float = math.inf


@dataclass
class ProfileCurve:
    """Sampled radial profile (s, t, r, dt/ds, dr/ds) of one surface."""

    s: np.ndarray
    t: np.ndarray
    r: np.ndarray
    tdot: np.ndarray
    rdot: np.ndarray
    alpha: float
    termination: str = "span"
    termination_start: str = "span"
    unit_residual: np.ndarray = field(default=None, repr=False)

    @property
    def monotone_t(self) -> bool:
        return bool(np.all(np.diff(self.t) > 0))

    def umbilicity_residual(self, st: ClassSSpacetime) -> np.ndarray:
        f = np.array([st.f(r) for r in self.r])
        return np.abs(f * self.tdot / self.r - self.alpha)

    def compute_unit_residual(self, st: ClassSSpacetime) -> np.ndarray:
        f = np.array([st.f(r) for r in self.r])
        return np.abs(f * self.tdot ** 2 - self.rdot ** 2 / f - 1.0)


@dataclass(frozen=True)
class PhotonSphere:
    """Constant-radius photon surface: root of f'(r) r = 2 f(r)."""

    r_star: float
    alpha_star: float
    residual: float


class SurfaceKind(enum.Enum):
    PHOTON_SPHERE = "PhotonSphere"
    SUBCRITICAL = "Subcritical"
    CRITICAL = "Critical"
    SUPERCRITICAL = "Supercritical"
    NO_SPHERE_REFERENCE = "NoSphereReference"


@dataclass(frozen=True)
class SurfaceClass:
    kind: SurfaceKind
    turning_radii: tuple[float, ...]
    regions: tuple[str, ...]  # position of r0 relative to each photon sphere
    spheres: tuple[PhotonSphere, ...]


def _scan_roots(g, lo, hi, grid):
    """Bracketed roots of g on a log-spaced grid, refined by brentq."""
    rs = np.geomspace(lo, hi, grid)
    vals = np.array([g(r) for r in rs])
    roots = []
    for i in range(len(rs) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            roots.append(float(rs[i]))
        elif a * b < 0:
            roots.append(float(brentq(g, rs[i], rs[i + 1],
                                      xtol=PHOTON_SPHERE_XTOL, rtol=8.9e-16)))
    if vals[-1] == 0.0:
        roots.append(float(rs[-1]))
    return roots


def find_photon_spheres(st: ClassSSpacetime, grid: int = 512,
                        bracket: tuple[float, float] | None = None) -> list[PhotonSphere]:
    """All photon sphere radii in the (clipped) radial interval, ascending."""
    if grid < 8:
        raise ValueError("need a scan grid of at least 8 points")
    lo, hi = bracket if bracket is not None else st.default_bracket()

    def g(r):
        fv, dfv = st.metric(r)
        return dfv * r - 2 * fv

    spheres = []
    for r_star in _scan_roots(g, lo, hi, grid):
        fv = st.f(r_star)
        spheres.append(PhotonSphere(r_star, math.sqrt(fv) / r_star, abs(g(r_star))))
    return spheres


def profile_slope_squared(st: ClassSSpacetime, alpha: float, r: float) -> float:
    """(dr/dt)^2 for a surface of factor alpha; negative means forbidden radius."""
    fv = st.f(r)
    a2r2 = alpha ** 2 * r ** 2
    return fv ** 2 * (a2r2 - fv) / a2r2


def turning_points(st: ClassSSpacetime, alpha: float, grid: int = 512,
                   bracket: tuple[float, float] | None = None) -> list[float]:
    """Radii where dr/ds changes sign: roots of alpha^2 r^2 - f(r)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    lo, hi = bracket if bracket is not None else st.default_bracket()
    return _scan_roots(lambda r: alpha ** 2 * r ** 2 - st.f(r), lo, hi, grid)


def _constant_curve(st, spec, step, r_star):
    fv = st.f(r_star)
    tdot = 1.0 / math.sqrt(fv)
    s = _sample_grid(spec.span, step.sample_spacing)
    t = spec.t0 + tdot * s
    return ProfileCurve(
        s=s, t=t, r=np.full_like(s, r_star),
        tdot=np.full_like(s, tdot), rdot=np.zeros_like(s),
        alpha=spec.alpha, termination="span",
        unit_residual=np.zeros_like(s))


def _sample_grid(span, spacing):
    lo, hi = span
    fwd = np.arange(0.0, hi + 0.5 * spacing, spacing)
    fwd = fwd[fwd <= hi + 1e-15]
    bwd = -np.arange(spacing, -lo + 0.5 * spacing, spacing)
    bwd = bwd[bwd >= lo - 1e-15]
    return np.concatenate([bwd[::-1], fwd])


def _integrate_halfline(rhs, y0, s_end, step, events):
    """One solve_ivp run over [0, s_end] (s_end may be negative)."""
    sol = solve_ivp(rhs, (0.0, s_end), y0, method="RK45", dense_output=True,
                    rtol=step.rtol, atol=step.atol, max_step=step.max_step,
                    events=[ev for ev, _ in events])
    if sol.status == -1:
        raise StepUnderflowError(
            f"step-size underflow at s = {sol.t[-1]:.6g}: {sol.message}",
            last_state=(sol.t[-1], tuple(sol.y[:, -1])))
    reason = "span"
    if sol.status == 1:
        for (_, tag), hits in zip(events, sol.t_events):
            if len(hits):
                reason = tag
                break
    return sol, reason


def integrate_profile(st: ClassSSpacetime, spec: PhotonSurfaceSpec,
                      step: StepControl = StepControl(),
                      spheres: list[PhotonSphere] | None = None) -> ProfileCurve:
    """Integrate the radial profile of one photon surface over its span.

    The exact cylinder solution is returned when the initial data sits on a
    photon sphere.  Otherwise the regularized second-order radial equation is
    integrated with adaptive 4/5-order stepping; the curve terminates at the
    span end, at the radial interval boundary, or when it is asymptotic to a
    photon sphere (|r - r_*| and |dr/ds| jointly below ASYMPTOTE_EPS).
    """
    alpha = spec.alpha
    f0, df0 = st.metric(spec.r0)
    if not st.contains(spec.r0):
        raise ForbiddenRadiusError(f"r0 = {spec.r0:.6g} outside radial interval")
    disc = alpha ** 2 * spec.r0 ** 2 - f0
    scale = max(1.0, alpha ** 2 * spec.r0 ** 2)
    if disc < -1e-12 * scale:
        raise ForbiddenRadiusError(
            f"alpha^2 r0^2 = {alpha**2*spec.r0**2:.6g} < f(r0) = {f0:.6g}: "
            "no real initial dr/ds")

    if spheres is None:
        spheres = find_photon_spheres(st)

    # exact fixed point: photon sphere initial data (within the
    # classification band, since the fixed point is unstable and nearby
    # data cannot be meaningfully integrated over long spans)
    if abs(disc) <= 1e-12 * scale and abs(df0 * spec.r0 - 2 * f0) <= 1e-9:
        return _constant_curve(st, spec, step, spec.r0)
    for sp in spheres:
        if abs(alpha - sp.alpha_star) <= CRITICAL_RTOL * sp.alpha_star \
                and abs(spec.r0 - sp.r_star) <= 1e-9 * sp.r_star:
            return _constant_curve(st, spec, step, sp.r_star)

    if spec.sign == 0 and disc > 1e-12 * scale:
        raise ForbiddenRadiusError("sign = 0 is only valid at a turning point")

    def rhs(s, y):
        _, r, v = y
        fv, dfv = st.metric(r)
        return (alpha * r / fv, v, alpha ** 2 * r - 0.5 * dfv)

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

    for sp in spheres:
        if abs(alpha - sp.alpha_star) <= CRITICAL_RTOL * sp.alpha_star:
            def ev_asym(s, y, r_star=sp.r_star):
                return (y[1] - r_star) ** 2 + y[2] ** 2 - ASYMPTOTE_EPS ** 2
            ev_asym.terminal = True
            events.append((ev_asym, "asymptotic-to-photon-sphere"))

    v0 = spec.sign * math.sqrt(max(disc, 0.0))
    y0 = (spec.t0, spec.r0, v0)
    s_lo, s_hi = spec.span

    parts = []
    reason_fwd = reason_bwd = "span"
    if s_hi > 0:
        sol, reason_fwd = _integrate_halfline(rhs, y0, s_hi, step, events)
        s_samp = np.arange(0.0, sol.t[-1] + 0.5 * step.sample_spacing,
                           step.sample_spacing)
        s_samp = s_samp[s_samp <= sol.t[-1] + 1e-15]
        parts.append((s_samp, sol.sol(s_samp)))
    if s_lo < 0:
        sol, reason_bwd = _integrate_halfline(rhs, y0, s_lo, step, events)
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

    t, r, v = y
    f = np.array([st.f(rr) for rr in r])
    tdot = alpha * r / f
    curve = ProfileCurve(s=s, t=t, r=r, tdot=tdot, rdot=v, alpha=alpha,
                         termination=reason_fwd, termination_start=reason_bwd)
    curve.unit_residual = np.abs(f * tdot ** 2 - v ** 2 / f - 1.0)
    return curve


@dataclass(frozen=True)
class ResidualReport:
    """Maximum second-order ODE and unit-speed residuals of a sampled curve."""

    tddot_residual: float
    rddot_residual: float
    unit_residual: float

    @property
    def worst(self) -> float:
        return max(self.tddot_residual, self.rddot_residual, self.unit_residual)


def ode_residuals(st: ClassSSpacetime, curve: ProfileCurve) -> ResidualReport:
    """Residuals of the second-order profile system via centered differences."""
    if len(curve.s) < 5:
        raise ValueError("need at least 5 samples for finite differencing")
    s, t, r = curve.s, curve.t, curve.r
    tdot, rdot = curve.tdot, curve.rdot
    tddot = np.gradient(tdot, s)
    rddot = np.gradient(rdot, s)
    f = np.array([st.f(rr) for rr in r])
    df = np.array([st.fprime(rr) for rr in r])
    res_t = tddot + (df / f) * rdot * tdot - (rdot / r) * tdot
    res_r = rddot + 0.5 * f * df * tdot ** 2 - 0.5 * (df / f) * rdot ** 2 \
        - (f * tdot) ** 2 / r
    unit = np.abs(f * tdot ** 2 - rdot ** 2 / f - 1.0)
    interior = slice(1, -1)
    return ResidualReport(
        tddot_residual=float(np.max(np.abs(res_t[interior]))),
        rddot_residual=float(np.max(np.abs(res_r[interior]))),
        unit_residual=float(np.max(unit)))


def classify(st: ClassSSpacetime, alpha: float, r0: float,
             spheres: list[PhotonSphere] | None = None) -> SurfaceClass:
    """Group a surface by its umbilicity factor relative to the photon spheres."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if spheres is None:
        spheres = find_photon_spheres(st)
    tps = tuple(turning_points(st, alpha))
    regions = tuple("below" if r0 < sp.r_star else "above" for sp in spheres)

    if not spheres:
        kind = SurfaceKind.NO_SPHERE_REFERENCE
    else:
        nearest = min(spheres, key=lambda sp: abs(alpha - sp.alpha_star))
        if abs(alpha - nearest.alpha_star) <= CRITICAL_RTOL * nearest.alpha_star:
            if abs(r0 - nearest.r_star) <= 1e-9 * nearest.r_star:
                kind = SurfaceKind.PHOTON_SPHERE
            else:
                kind = SurfaceKind.CRITICAL
        elif alpha < nearest.alpha_star:
            kind = SurfaceKind.SUBCRITICAL
        else:
            kind = SurfaceKind.SUPERCRITICAL
    return SurfaceClass(kind=kind, turning_radii=tps, regions=regions,
                        spheres=tuple(spheres))


def minkowski_exact(alpha: float, t0: float, t) -> float:
    """Closed-form hyperboloid radius r(t) = sqrt(1/alpha^2 + (t - t0)^2)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return np.sqrt(alpha ** (-2) + (np.asarray(t, dtype=float) - t0) ** 2)
