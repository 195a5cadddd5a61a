"""Command line front end: single integrations, sweeps, verification, export.

Configuration is an INI file.  The [spacetime] section selects the metric
family (family, n, m, q, L, r_lo, r_hi, or table = CSV path for a custom
profile); the [profile], [geodesic], [sweep] and [isotropic] sections hold
the parameters of the matching subcommand.

Exit codes: 0 success, 2 config error, 3 invalid surface/geodesic spec,
4 empty sweep, 5 verification failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .errors import (
    DomainError,
    ForbiddenRadiusError,
    InvalidFamilyParamsError,
    PhotonSurfError,
    UnknownFamilyError,
)
from .geodesics import (
    ConservedCharges,
    critical_impact_parameter,
    integrate_null_geodesic,
)
from .geometry import verification_suite
from .spacetime import build_family, conformal_flatness_scan, \
    spacetime_from_table, to_isotropic
from .surfaces import (
    PhotonSurfaceSpec,
    StepControl,
    classify,
    find_photon_spheres,
    integrate_profile,
    ode_residuals,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVALID_SPEC = 3
EXIT_EMPTY_SWEEP = 4
EXIT_VERIFY_FAILED = 5


def fmt(x) -> str:
    """Shortest round-trip decimal representation of a float."""
    return repr(float(x))


def _load_config(path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as e:
        raise SystemExitWith(EXIT_CONFIG, f"cannot read config {path}: {e}")
    except configparser.Error as e:
        raise SystemExitWith(EXIT_CONFIG, f"config parse failure: {e}")
    return cp


class SystemExitWith(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _build_spacetime(cp: configparser.ConfigParser):
    if "spacetime" not in cp:
        raise SystemExitWith(EXIT_CONFIG, "config is missing a [spacetime] section")
    sec = cp["spacetime"]
    family = sec.get("family", "").strip()
    if not family:
        raise SystemExitWith(EXIT_CONFIG, "[spacetime] family is required")

    def fl(key):
        raw = sec.get(key, None)
        if raw is None or raw.strip() == "":
            return None
        try:
            return float(raw)
        except ValueError:
            raise SystemExitWith(EXIT_CONFIG, f"[spacetime] {key} = {raw!r} is not a number")

    try:
        n = int(sec.get("n", "3"))
    except ValueError:
        raise SystemExitWith(EXIT_CONFIG, f"[spacetime] n = {sec.get('n')!r} is not an integer")

    try:
        if family.lower() == "custom":
            table = sec.get("table", "").strip()
            if not table:
                raise SystemExitWith(EXIT_CONFIG, "custom family requires table = CSV path")
            return spacetime_from_table(table, n=n, r_lo=fl("r_lo"), r_hi=fl("r_hi"))
        return build_family(family, n=n, m=fl("m"), q=fl("q"), L=fl("L"),
                            r_lo=fl("r_lo"), r_hi=fl("r_hi"))
    except (UnknownFamilyError, InvalidFamilyParamsError, DomainError, OSError) as e:
        raise SystemExitWith(EXIT_CONFIG, str(e))


def _sec_float(sec, key, default=None):
    raw = sec.get(key, None)
    if raw is None or raw.strip() == "":
        if default is None:
            raise SystemExitWith(EXIT_CONFIG, f"[{sec.name}] {key} is required")
        return default
    try:
        return float(raw)
    except ValueError:
        raise SystemExitWith(EXIT_CONFIG, f"[{sec.name}] {key} = {raw!r} is not a number")


def _sec_floats(sec, key):
    raw = sec.get(key, "")
    vals = []
    for tok in raw.replace(",", " ").split():
        try:
            vals.append(float(tok))
        except ValueError:
            raise SystemExitWith(EXIT_CONFIG, f"[{sec.name}] {key}: bad value {tok!r}")
    return vals


def _spacetime_summary(st):
    return {
        "family": st.family,
        "n": st.n,
        "params": {k: v for k, v in st.params.items()},
        "r_lo": st.r_lo,
        "r_hi": None if math.isinf(st.r_hi) else st.r_hi,
        "flags": list(st.flags),
    }


def _write_manifest(out_dir, name, payload):
    payload = dict(payload)
    payload["version"] = __version__
    path = os.path.join(out_dir, name)
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return path


def _write_profile_csv(path, curve):
    with open(path, "w") as fh:
        fh.write("s,t,r,dt_ds,dr_ds,unit_residual\n")
        for i in range(len(curve.s)):
            fh.write(",".join(fmt(v) for v in (
                curve.s[i], curve.t[i], curve.r[i], curve.tdot[i],
                curve.rdot[i], curve.unit_residual[i])) + "\n")


def _write_geodesic_csv(path, traj):
    with open(path, "w") as fh:
        fh.write("s,t,r,phi,null_residual\n")
        for i in range(len(traj.s)):
            fh.write(",".join(fmt(v) for v in (
                traj.s[i], traj.t[i], traj.r[i], traj.phi[i],
                traj.null_residual[i])) + "\n")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_spheres(args, cp):
    st = _build_spacetime(cp)
    spheres = find_photon_spheres(st)
    rows = [{"r_star": sp.r_star, "alpha_star": sp.alpha_star,
             "b_star": critical_impact_parameter(st, sp),
             "residual": sp.residual} for sp in spheres]
    if args.format == "json":
        print(json.dumps({"spacetime": _spacetime_summary(st), "spheres": rows},
                         sort_keys=True, indent=2))
    else:
        if not rows:
            print("no photon spheres")
        else:
            print("r_star,alpha_star,b_star")
            for row in rows:
                print(",".join(fmt(row[k]) for k in ("r_star", "alpha_star", "b_star")))
    if args.out:
        _write_manifest(args.out, "spheres_manifest.json",
                        {"operation": "spheres",
                         "spacetime": _spacetime_summary(st),
                         "spheres": rows, "outputs": []})
    return EXIT_OK


def _profile_spec(cp, section="profile"):
    if section not in cp:
        raise SystemExitWith(EXIT_CONFIG, f"config is missing a [{section}] section")
    sec = cp[section]
    return PhotonSurfaceSpec(
        alpha=_sec_float(sec, "alpha"),
        r0=_sec_float(sec, "r0"),
        t0=_sec_float(sec, "t0", 0.0),
        sign=int(_sec_float(sec, "sign", 1.0)),
        span=(_sec_float(sec, "span_lo", -10.0), _sec_float(sec, "span_hi", 10.0)))


def _step_control(cp, section):
    spacing = 1e-2
    if section in cp:
        spacing = _sec_float(cp[section], "spacing", 1e-2)
    return StepControl(sample_spacing=spacing)


def cmd_profile(args, cp):
    st = _build_spacetime(cp)
    spec = _profile_spec(cp)
    step = _step_control(cp, "profile")
    spheres = find_photon_spheres(st)
    curve = integrate_profile(st, spec, step, spheres=spheres)
    cls = classify(st, spec.alpha, spec.r0, spheres=spheres)
    res = ode_residuals(st, curve)

    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    csv_path = os.path.join(out, "profile.csv")
    _write_profile_csv(csv_path, curve)
    payload = {
        "operation": "profile",
        "spacetime": _spacetime_summary(st),
        "spec": {"alpha": spec.alpha, "r0": spec.r0, "t0": spec.t0,
                 "sign": spec.sign, "span": list(spec.span)},
        "classification": cls.kind.value,
        "turning_radii": list(cls.turning_radii),
        "termination": curve.termination,
        "termination_start": curve.termination_start,
        "samples": len(curve.s),
        "residuals": {"tddot": res.tddot_residual, "rddot": res.rddot_residual,
                      "unit": res.unit_residual},
        "outputs": ["profile.csv"],
    }
    if args.oracle:
        from .geodesics import generated_surface_profile
        charges = ConservedCharges(energy=spec.alpha, angular_momentum=1.0)
        traj = integrate_null_geodesic(
            st, charges, spec.r0, sign=spec.sign,
            span=(2 * spec.span[0] * spec.r0, 2 * spec.span[1] * spec.r0),
            step=step, spheres=spheres)
        oracle = generated_surface_profile(traj, spacing=step.sample_spacing, st=st)
        import numpy as np
        from scipy.interpolate import PchipInterpolator
        interp = PchipInterpolator(oracle.t, oracle.r)
        mask = (curve.t >= oracle.t[0]) & (curve.t <= oracle.t[-1])
        dev = float(np.max(np.abs(interp(curve.t[mask]) - curve.r[mask]))) \
            if mask.any() else None
        payload["oracle_max_deviation"] = dev
    _write_manifest(out, "profile_manifest.json", payload)
    print(f"classification: {cls.kind.value}  samples: {len(curve.s)}  "
          f"worst residual: {fmt(res.worst)}")
    if args.oracle:
        print(f"oracle max deviation: {payload['oracle_max_deviation']}")
    return EXIT_OK


def cmd_geodesic(args, cp):
    st = _build_spacetime(cp)
    if "geodesic" not in cp:
        raise SystemExitWith(EXIT_CONFIG, "config is missing a [geodesic] section")
    sec = cp["geodesic"]
    charges = ConservedCharges(energy=_sec_float(sec, "energy"),
                               angular_momentum=_sec_float(sec, "ell"))
    r0 = _sec_float(sec, "r0")
    sign = int(_sec_float(sec, "sign", 1.0))
    span = (_sec_float(sec, "span_lo", -10.0), _sec_float(sec, "span_hi", 10.0))
    step = _step_control(cp, "geodesic")
    traj = integrate_null_geodesic(st, charges, r0, sign=sign, span=span, step=step)

    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    _write_geodesic_csv(os.path.join(out, "geodesic.csv"), traj)
    payload = {
        "operation": "geodesic",
        "spacetime": _spacetime_summary(st),
        "charges": {"energy": charges.energy, "ell": charges.angular_momentum},
        "lambda": (charges.energy / charges.angular_momentum
                   if charges.angular_momentum > 0 else None),
        "principal": charges.principal,
        "termination": traj.termination,
        "termination_start": traj.termination_start,
        "samples": len(traj.s),
        "max_null_residual": float(traj.null_residual.max()),
        "outputs": ["geodesic.csv"],
    }
    _write_manifest(out, "geodesic_manifest.json", payload)
    print(f"termination: {traj.termination}  samples: {len(traj.s)}  "
          f"max null residual: {fmt(traj.null_residual.max())}")
    return EXIT_OK


def _sweep_cell(st, spheres, alpha, r0, span, step):
    spec = PhotonSurfaceSpec(alpha=alpha, r0=r0, sign=1, span=span)
    curve = integrate_profile(st, spec, step, spheres=spheres)
    cls = classify(st, alpha, r0, spheres=spheres)
    return curve, cls


def cmd_sweep(args, cp):
    st = _build_spacetime(cp)
    if "sweep" not in cp:
        raise SystemExitWith(EXIT_CONFIG, "config is missing a [sweep] section")
    sec = cp["sweep"]
    alphas = _sec_floats(sec, "alphas")
    r0s = _sec_floats(sec, "r0s")
    if not alphas or not r0s:
        print("empty sweep grid", file=sys.stderr)
        return EXIT_EMPTY_SWEEP
    span = (_sec_float(sec, "span_lo", -10.0), _sec_float(sec, "span_hi", 10.0))
    step = _step_control(cp, "sweep")
    spheres = find_photon_spheres(st)

    out = args.out or "."
    os.makedirs(out, exist_ok=True)

    cells = [(ia, ir, a, r0) for ia, a in enumerate(alphas)
             for ir, r0 in enumerate(r0s)]

    def run(cell):
        ia, ir, a, r0 = cell
        try:
            curve, cls = _sweep_cell(st, spheres, a, r0, span, step)
        except (ForbiddenRadiusError, PhotonSurfError) as e:
            return (ia, ir, a, r0, None, None, str(e))
        return (ia, ir, a, r0, curve, cls, None)

    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        results = list(pool.map(run, cells))

    items = []
    outputs = []
    produced = 0
    for ia, ir, a, r0, curve, cls, err in results:
        name = f"sweep_a{ia}_r{ir}.csv"
        item = {"alpha": a, "r0": r0, "file": None, "status": "skipped",
                "reason": err}
        if curve is not None:
            _write_profile_csv(os.path.join(out, name), curve)
            outputs.append(name)
            item.update(file=name, status="ok", reason=None,
                        classification=cls.kind.value,
                        turning_radii=list(cls.turning_radii),
                        termination=curve.termination,
                        termination_start=curve.termination_start,
                        samples=len(curve.s))
            produced += 1
        items.append(item)

    if produced == 0:
        print("sweep produced no curves", file=sys.stderr)
        return EXIT_EMPTY_SWEEP

    # grouping is by umbilicity factor: the cylinder is the critical
    # group's distinguished member, not a group of its own
    def group_of(kind):
        return "Critical" if kind in ("PhotonSphere", "Critical") else kind

    groups = sorted({group_of(it["classification"]) for it in items
                     if it["status"] == "ok"})
    gp_lines = ["set datafile separator ','",
                "set xlabel 't'", "set ylabel 'r'", "set key outside"]
    plot_parts = []
    for it in items:
        if it["status"] != "ok":
            continue
        title = f"{it['classification']} a={fmt(it['alpha'])} r0={fmt(it['r0'])}"
        plot_parts.append(
            f"'{it['file']}' using 2:3 with lines title '{title}'")
    gp_lines.append("plot \\\n  " + ", \\\n  ".join(plot_parts))
    gp_path = os.path.join(out, "sweep.gp")
    with open(gp_path, "w") as fh:
        fh.write("\n".join(gp_lines) + "\n")
    outputs.append("sweep.gp")

    _write_manifest(out, "sweep_manifest.json", {
        "operation": "sweep",
        "spacetime": _spacetime_summary(st),
        "span": list(span),
        "classification_groups": groups,
        "cells": items,
        "outputs": outputs,
    })
    print(f"sweep: {produced}/{len(cells)} cells produced curves; "
          f"groups: {', '.join(groups)}")
    return EXIT_OK


def cmd_verify(args, cp):
    st = _build_spacetime(cp)
    checks = verification_suite(st, tol_scale=args.tol)
    report = {"operation": "verify", "spacetime": _spacetime_summary(st),
              "checks": checks,
              "passed": all(c["passed"] for c in checks)}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_manifest(args.out, "verify_report.json", report)
    if args.format == "json":
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        for c in checks:
            if c["skipped"]:
                status = "SKIP"
            else:
                status = "PASS" if c["passed"] else "FAIL"
            resid = "-" if c["residual"] is None else fmt(c["residual"])
            line = f"{status:4s} {c['name']:28s} residual {resid} tol {fmt(c['tol'])}"
            if c["message"]:
                line += f"  ({c['message']})"
            print(line)
    if not report["passed"]:
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_isotropic(args, cp):
    st = _build_spacetime(cp)
    sec = cp["isotropic"] if "isotropic" in cp else {}
    lo, hi = st.default_bracket()
    r0 = _sec_float(sec, "r0", math.sqrt(lo * hi)) if sec else math.sqrt(lo * hi)
    samples = int(_sec_float(sec, "samples", 256.0)) if sec else 256
    iso = to_isotropic(st, r0=r0)

    import numpy as np
    s_lo = iso.s_lo if iso.s_lo > 0 else 1e-6
    s_hi = iso.s_hi if math.isfinite(iso.s_hi) else 100 * max(1.0, s_lo)
    ss = np.geomspace(s_lo * (1 + 1e-7), s_hi * (1 - 1e-7), samples)

    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    csv_path = os.path.join(out, "isotropic.csv")
    with open(csv_path, "w") as fh:
        fh.write("s,r,psi,dpsi_ds,N,dN_ds,log_gap\n")
        for s in ss:
            p, dp = iso.psi(s)
            nn, dnn = iso.lapse(s)
            fh.write(",".join(fmt(v) for v in (
                s, s * p, p, dp, nn, dnn, dnn / nn - dp / p)) + "\n")

    from .geometry import isotropic_sphere_residual
    spheres = find_photon_spheres(st)
    sphere_rows = []
    for sp in spheres:
        s_star = float(iso.s_of_r(sp.r_star))
        sphere_rows.append({"r_star": sp.r_star, "s_star": s_star,
                            "residual": isotropic_sphere_residual(iso, s_star)})
    flat = conformal_flatness_scan(iso)
    _write_manifest(out, "isotropic_manifest.json", {
        "operation": "isotropic",
        "spacetime": _spacetime_summary(st),
        "r0": r0,
        "s_lo": iso.s_lo,
        "s_hi": None if math.isinf(iso.s_hi) else iso.s_hi,
        "photon_spheres": sphere_rows,
        "conformally_flat_intervals": [list(iv) for iv in flat],
        "outputs": ["isotropic.csv"],
    })
    print(f"isotropic interval: ({fmt(iso.s_lo)}, "
          f"{'inf' if math.isinf(iso.s_hi) else fmt(iso.s_hi)})  "
          f"spheres: {len(sphere_rows)}  flat intervals: {len(flat)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _parser():
    ap = argparse.ArgumentParser(
        prog="photonsurf",
        description="Photon surfaces and null geodesics in static, "
                    "spherically symmetric spacetimes")
    ap.add_argument("--config", required=True, help="INI config file")
    ap.add_argument("--out", default=None, help="output directory")
    ap.add_argument("--workers", type=int, default=None,
                    help="sweep worker count (env PHOTONSURF_WORKERS overrides)")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--tol", type=float, default=1.0,
                    help="verification tolerance scale factor")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("spheres", help="locate photon spheres")
    p = sub.add_parser("profile", help="integrate one photon surface profile")
    p.add_argument("--oracle", action="store_true",
                   help="cross-check against a generating null geodesic")
    sub.add_parser("geodesic", help="integrate one null geodesic")
    sub.add_parser("sweep", help="integrate a grid of (alpha, r0) profiles")
    sub.add_parser("verify", help="run the curvature/isotropic check suite")
    sub.add_parser("isotropic", help="rewrite the metric in isotropic form")
    return ap


def main(argv=None) -> int:
    ap = _parser()
    args = ap.parse_args(argv)

    env_workers = os.environ.get("PHOTONSURF_WORKERS")
    if env_workers is not None:
        try:
            args.workers = int(env_workers)
        except ValueError:
            print(f"PHOTONSURF_WORKERS = {env_workers!r} is not an integer",
                  file=sys.stderr)
            return EXIT_CONFIG
    if args.workers is None:
        args.workers = min(4, os.cpu_count() or 1)
    if args.workers < 1:
        print("worker count must be >= 1", file=sys.stderr)
        return EXIT_CONFIG

    handlers = {"spheres": cmd_spheres, "profile": cmd_profile,
                "geodesic": cmd_geodesic, "sweep": cmd_sweep,
                "verify": cmd_verify, "isotropic": cmd_isotropic}
    try:
        cp = _load_config(args.config)
        return handlers[args.command](args, cp)
    except SystemExitWith as e:
        print(str(e), file=sys.stderr)
        return e.code
    except (ForbiddenRadiusError, DomainError) as e:
        print(f"invalid spec: {e}", file=sys.stderr)
        return EXIT_INVALID_SPEC
    except PhotonSurfError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID_SPEC


if __name__ == "__main__":
    sys.exit(main())
