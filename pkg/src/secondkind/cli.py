"""Command line front end: curve ingestion, computation, verification suites.

Exit codes: 0 success, 1 verification failure, 2 invalid input.  JSON output
is byte-identical for identical configuration and seed: numbers are printed
with 17 significant digits, complex values as [re, im] pairs, matrices as
row-major arrays of pairs, and key order is fixed by construction.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .correspondence import BranchMatching, bolza_match
from .curves import (
    HyperellipticCurve,
    branch_points,
    curve_from_branch_points,
    curve_from_coefficients,
)
from .errors import SecondKindError
from .expansion import DEFAULT_ORDER, RESIDUAL_TOL, expansion_match
from .identities import (
    IdentityEntry,
    jacobi_inversion_check,
    kappa_report,
    omega_a_period,
    omega_algebraic,
    omega_consistency,
    relative_defect,
    rosenhain_defects,
    rosenhain_gamma_pairs,
    thomae_defects,
    thomae_genus1_defect,
    weierstrass_eta,
)
from .periods import DEFAULT_QUAD_TOL, compute_periods
from .theta import DEFAULT_THETA_TOL, half_period, theta_table

DEFAULT_IDENTITY_TOL = 1e-8
OMEGA_STENCIL_TOL = 1e-5
KAPPA_ROUTE_TOL = 1e-7
STANDARD_BRANCH_POINTS = (-2.0, -1.0, 0.0, 1.0, 2.0)


# ---------------------------------------------------------------- reporting

def _num(x) -> str:
    x = float(x) + 0.0  # normalize -0.0
    return format(x, ".17g")


def _dump(obj) -> str:
    """Deterministic JSON with fixed 17-significant-digit floats."""
    if isinstance(obj, dict):
        return "{" + ",".join(json.dumps(str(k)) + ":" + _dump(v) for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_dump(v) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"unserializable value of type {type(obj).__name__}")


def _pair(z) -> list:
    z = complex(z)
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def _mat(m) -> list:
    arr = np.atleast_2d(np.asarray(m, dtype=complex))
    return [[_pair(v) for v in row] for row in arr]


def _char_ints(ch) -> list:
    return [int(v) for v in ch.top] + [int(v) for v in ch.bottom]


def _entry_dict(e: IdentityEntry) -> dict:
    d = {
        "identity": e.label,
        "lhs": _pair(e.lhs),
        "rhs": _pair(e.rhs),
        "defect": float(e.defect),
    }
    if e.sign is not None:
        d["sign"] = int(e.sign)
    d["status"] = e.status
    return d


def _error_dict(label: str, ex: Exception) -> dict:
    return {
        "identity": label,
        "status": "fail",
        "error": f"{type(ex).__name__}: {ex}",
    }


def _identity(label: str, lhs, rhs, tol: float) -> IdentityEntry:
    lhs, rhs = complex(lhs), complex(rhs)
    d = relative_defect(lhs, rhs)
    return IdentityEntry(label, lhs, rhs, d, None, "pass" if d < tol else "fail")


def _scalar(label: str, value: float, tol: float) -> IdentityEntry:
    v = float(value)
    return IdentityEntry(label, complex(v), 0j, v, None, "pass" if v < tol else "fail")


def _curve_dict(curve: HyperellipticCurve) -> dict:
    return {
        "genus": curve.genus,
        "lambda": [_pair(curve.lam_at(k)) for k in range(2 * curve.genus + 1)],
        "branch_points": [_pair(e) for e in branch_points(curve)],
    }


# ------------------------------------------------------------- curve input

def _as_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 \
            and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    raise ValueError("numbers must be scalars or [re, im] pairs")


def parse_curve(text: str) -> HyperellipticCurve:
    """Curve from JSON: {"branch_points": [...]} or {"genus": g, "lambda": [...]}.

    lambda lists lam_0..lam_2g ascending; the leading coefficient 4 of the
    odd-degree model is implied.
    """
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError("curve JSON must be an object")
    if "branch_points" in data:
        pts = [_as_complex(v) for v in data["branch_points"]]
        curve = curve_from_branch_points(pts)
    elif "lambda" in data:
        lam = [_as_complex(v) for v in data["lambda"]]
        curve = curve_from_coefficients(lam)
    else:
        raise ValueError("curve JSON needs 'branch_points' or 'lambda'")
    if "genus" in data and int(data["genus"]) != curve.genus:
        raise ValueError(f"declared genus {data['genus']} but curve has genus {curve.genus}")
    return curve


def _load_curve(args) -> HyperellipticCurve | None:
    if args.curve and args.curve_file:
        raise ValueError("pass --curve or --curve-file, not both")
    if args.curve:
        return parse_curve(args.curve)
    if args.curve_file:
        with open(args.curve_file, "r", encoding="utf-8") as fh:
            return parse_curve(fh.read())
    return None


def random_curve(rng: np.random.Generator, genus: int = 2, real: bool = False,
                 zero_trace: bool = False) -> HyperellipticCurve:
    """Seeded curve in the annulus 0.3 <= |e| <= 2, pairwise separation >= 0.2.

    zero_trace recenters the sample so the branch points sum to zero, which
    kills the subleading polynomial coefficient (lam_4 for genus 2, lam_2
    for genus 1).
    """
    n = 2 * genus + 1
    for _ in range(1000):
        pts: list[complex] = []
        for _ in range(n):
            for _ in range(200):
                if real:
                    z = complex(rng.uniform(-2.0, 2.0), 0.0)
                else:
                    z = rng.uniform(0.3, 2.0) * np.exp(2j * np.pi * rng.uniform())
                if not 0.3 <= abs(z) <= 2.0:
                    continue
                if all(abs(z - w) >= 0.2 for w in pts):
                    pts.append(complex(z))
                    break
            else:
                break
        if len(pts) < n:
            continue
        if zero_trace:
            c = sum(pts) / n
            pts = [z - c for z in pts]
        try:
            return curve_from_branch_points(pts)
        except SecondKindError:
            continue
    raise RuntimeError("curve sampling failed to satisfy the separation constraints")


# ------------------------------------------------------------ single emits

def _periods_report(curve: HyperellipticCurve, bundle) -> dict:
    return {
        "curve": _curve_dict(curve),
        "quad_tol": float(bundle.quad_tol),
        "omega": _mat(bundle.omega),
        "omega_prime": _mat(bundle.omega_prime),
        "eta": _mat(bundle.eta),
        "eta_prime": _mat(bundle.eta_prime),
        "tau": _mat(bundle.tau),
        "kappa": _mat(bundle.kappa),
        "legendre_defect": float(bundle.legendre_defect),
        "tau_asymmetry": float(bundle.tau_asymmetry),
        "im_tau_min_eigenvalue": float(bundle.im_tau_min_eig),
        "kappa_asymmetry": float(bundle.kappa_asymmetry),
        "eta_prime_consistency": float(bundle.eta_prime_consistency),
    }


def _theta_report(bundle, tt) -> dict:
    chars = []
    for ch in tt.characteristics:
        ent = tt.entry(ch)
        chars.append({
            "char": _char_ints(ch),
            "parity": int(ch.parity),
            "value": _pair(ent.value),
            "radius": int(ent.radius),
        })
    return {
        "tau": _mat(tt.tau),
        "theta_tol": float(tt.tol),
        "lattice_radius": max(int(tt.entry(c).radius) for c in tt.characteristics),
        "characteristics": chars,
    }


def _match_report(m: BranchMatching) -> dict:
    pairs = []
    for k in range(1, len(m.chars) + 1):
        pairs.append({
            "branch_index": k,
            "char": _char_ints(m.delta(k)),
            "residual": float(m.residuals[k - 1]),
        })
    return {"gamma": _char_ints(m.gamma), "pairs": pairs}


def _kappa_report_g2(curve, bundle, tt, m, order) -> dict:
    rep = kappa_report(curve, bundle, tt, m)
    ex = expansion_match(curve, bundle, tt, m, order=order)
    defects = dict(rep.defect_table)
    defects["expansion"] = float(np.max(np.abs(ex["kappa"] - bundle.kappa)))
    return {
        "kappa_direct": _mat(rep.kappa_direct),
        "kappa_even_pair": {f"{i}{j}": _mat(v) for (i, j), v in sorted(rep.kappa_by_even_pair.items())},
        "kappa_even_sum": _mat(rep.kappa_even_sum),
        "kappa_odd": {str(i + 1): _mat(rep.kappa_by_odd[m.delta(i + 1)]) for i in range(5)},
        "kappa_odd_sum": _mat(rep.kappa_odd_sum),
        "kappa_expansion": _mat(ex["kappa"]),
        "defects": {k: float(v) for k, v in defects.items()},
    }


def _kappa_report_g1(curve, bundle, tt, order) -> dict:
    ex = expansion_match(curve, bundle, tt, None, order=order)
    checks = [_entry_dict(e) for e in weierstrass_eta(curve, bundle, tt).entries]
    checks.append(_entry_dict(thomae_genus1_defect(tt)))
    return {
        "kappa_direct": _mat(bundle.kappa),
        "kappa_expansion": _mat(ex["kappa"]),
        "defects": {"expansion": float(np.max(np.abs(ex["kappa"] - bundle.kappa)))},
        "identities": checks,
    }


def _series_dict(s, order: int) -> dict:
    lo = max(s.e0, -2)
    exps = list(range(lo, order + 1))
    return {
        "exponents": exps,
        "coefficients": [_pair(s.coeff(n)) for n in exps],
    }


def _expand_report(curve, bundle, tt, m, order) -> dict:
    ex = expansion_match(curve, bundle, tt, m, order=order)
    basis = {f"{a}{b}": _series_dict(s, order) for (a, b), s in sorted(ex["basis"].items())}
    theta_side = {ch.label(): _series_dict(s, order) for ch, s in ex["theta_side"].items()}
    return {
        "order": int(order),
        "kappa": _mat(ex["kappa"]),
        "residual": float(ex["residual"]),
        "residual_tol": float(RESIDUAL_TOL),
        "algebraic": {"base": _series_dict(ex["base"], order), "kappa_basis": basis},
        "theta_side": theta_side,
    }


# -------------------------------------------------------------- verify suite

def _gate_entries(bundle, quad_tol: float) -> list:
    lg_tol = max(1e-9, 1e3 * quad_tol)
    sym_tol = max(1e-10, 100.0 * quad_tol)
    eig = float(bundle.im_tau_min_eig)
    out = [
        _scalar("gate_legendre", bundle.legendre_defect, lg_tol),
        _scalar("gate_tau_asymmetry", bundle.tau_asymmetry, sym_tol),
        IdentityEntry("gate_im_tau_positive", complex(eig), 0j,
                      max(0.0, -eig), None, "pass" if eig > 0 else "fail"),
        _scalar("gate_eta_prime_consistency", bundle.eta_prime_consistency, lg_tol),
    ]
    return out


def _omega_points(rng: np.random.Generator, curve: HyperellipticCurve):
    scale = max(1.0, max(abs(e) for e in curve.branch_points))
    for _ in range(500):
        x1 = scale * (rng.uniform(-2.0, 2.0) + 1j * rng.uniform(-2.0, 2.0))
        x2 = scale * (rng.uniform(-2.0, 2.0) + 1j * rng.uniform(-2.0, 2.0))
        if min(abs(x1 - e) for e in curve.branch_points) < 0.25:
            continue
        if min(abs(x2 - e) for e in curve.branch_points) < 0.25:
            continue
        if abs(x1 - x2) < 0.5:
            continue
        sheet = 1 if rng.uniform() < 0.5 else -1
        return curve.lift(x1), curve.lift(x2, sheet)
    raise RuntimeError("stencil point sampling failed")


def _battery_genus2(curve, args, rng, omega_pairs: int) -> list:
    tol = args.tol
    checks: list = []
    bundle = compute_periods(curve, args.quad_tol)
    checks.extend(_entry_dict(e) for e in _gate_entries(bundle, args.quad_tol))
    tt = theta_table(bundle, tol=args.theta_tol)
    m = bolza_match(tt, curve)
    checks.append(_entry_dict(_scalar("gate_matching_residual", max(m.residuals), 1e-6)))

    rep = kappa_report(curve, bundle, tt, m)
    for name, d in rep.defect_table.items():
        checks.append(_entry_dict(_scalar(f"kappa_route_{name}", d, KAPPA_ROUTE_TOL)))
    try:
        ex = expansion_match(curve, bundle, tt, m, order=args.order)
        checks.append(_entry_dict(_scalar(
            "kappa_route_expansion",
            float(np.max(np.abs(ex["kappa"] - bundle.kappa))), KAPPA_ROUTE_TOL)))
        checks.append(_entry_dict(_scalar("expansion_residual", ex["residual"], RESIDUAL_TOL)))
    except SecondKindError as exn:
        checks.append(_error_dict("kappa_route_expansion", exn))

    checks.extend(_entry_dict(e) for e in thomae_defects(curve, bundle, tt, m, tol).entries)

    # the verbatim third-derivative Rosenhain constant holds only for pairs of
    # admissible characteristics; pairs involving the Riemann constant get the
    # corrected factor-2 relation instead
    for e in rosenhain_defects(bundle, tt, m, tol).entries:
        if e.label.startswith("rosenhain_higher_") and e.label.endswith("6"):
            continue
        checks.append(_entry_dict(e))
    checks.extend(_entry_dict(e) for e in rosenhain_gamma_pairs(bundle, tt, m, tol).entries)

    for i in range(1, 6):
        for j in range(i + 1, 6):
            checks.extend(
                _entry_dict(e)
                for e in jacobi_inversion_check(curve, bundle, tt, m, i, j, tol).entries
            )

    if omega_pairs > 0:
        a_vec = half_period(m.chars[0], bundle.tau)
        r_last = None
        for idx in range(1, omega_pairs + 1):
            q, r = _omega_points(rng, curve)
            r_last = r
            checks.append(_entry_dict(_identity(
                f"omega_symmetry_{idx}",
                omega_algebraic(curve, bundle, q, r),
                omega_algebraic(curve, bundle, r, q), 1e-12)))
            try:
                d = omega_consistency(curve, bundle, tt, q, r, a_vec)
                checks.append(_entry_dict(_scalar(f"omega_stencil_{idx}", d, OMEGA_STENCIL_TOL)))
            except SecondKindError as exn:
                checks.append(_error_dict(f"omega_stencil_{idx}", exn))
        for j in (1, 2):
            ap = omega_a_period(curve, bundle, j, r_last)
            checks.append(_entry_dict(_identity(f"omega_a_period_{j}", ap, 0.0, 1e-8)))
    return checks


def _battery_genus1(curve, args) -> list:
    checks: list = []
    bundle = compute_periods(curve, args.quad_tol)
    checks.extend(_entry_dict(e) for e in _gate_entries(bundle, args.quad_tol))
    tt = theta_table(bundle, tol=args.theta_tol)
    checks.extend(_entry_dict(e) for e in weierstrass_eta(curve, bundle, tt).entries)
    checks.append(_entry_dict(thomae_genus1_defect(tt)))
    try:
        ex = expansion_match(curve, bundle, tt, None, order=args.order)
        checks.append(_entry_dict(_scalar(
            "kappa_route_expansion",
            float(np.max(np.abs(ex["kappa"] - bundle.kappa))), KAPPA_ROUTE_TOL)))
        checks.append(_entry_dict(_scalar("expansion_residual", ex["residual"], RESIDUAL_TOL)))
    except SecondKindError as exn:
        checks.append(_error_dict("kappa_route_expansion", exn))
    return checks


def _verify(args) -> tuple[dict, int]:
    given = _load_curve(args)
    curves: list[tuple[str, HyperellipticCurve]] = []
    if given is not None:
        curves.append(("given", given))
    else:
        curves.append(("standard_genus2", curve_from_branch_points(STANDARD_BRANCH_POINTS)))
    if args.suite == "full":
        rng_c = np.random.default_rng(args.seed)
        curves.append(("random_genus2_a", random_curve(rng_c)))
        curves.append(("random_genus2_b", random_curve(rng_c)))
        curves.append(("random_genus2_lam4zero", random_curve(rng_c, zero_trace=True)))
        curves.append(("random_genus1_a", random_curve(rng_c, genus=1)))
        curves.append(("random_genus1_real", random_curve(rng_c, genus=1, real=True)))

    rng_pts = np.random.default_rng((args.seed, 1))
    curve_reports = []
    failures = 0
    for pos, (name, curve) in enumerate(curves):
        omega_pairs = 0
        if curve.genus == 2 and pos == 0:
            omega_pairs = 1 if args.suite == "quick" else 2
        try:
            if curve.genus == 2:
                checks = _battery_genus2(curve, args, rng_pts, omega_pairs)
            else:
                checks = _battery_genus1(curve, args)
        except SecondKindError as exn:
            checks = [_error_dict("curve_pipeline", exn)]
        n_fail = sum(1 for c in checks if c["status"] == "fail")
        failures += n_fail
        curve_reports.append({
            "name": name,
            "curve": _curve_dict(curve),
            "checks": checks,
            "failures": n_fail,
        })
    report = {
        "suite": args.suite,
        "seed": int(args.seed),
        "tolerances": {
            "identity": float(args.tol),
            "kappa_route": float(KAPPA_ROUTE_TOL),
            "omega_stencil": float(OMEGA_STENCIL_TOL),
            "expansion_residual": float(RESIDUAL_TOL),
            "quad": float(args.quad_tol),
            "theta": float(args.theta_tol),
        },
        "curves": curve_reports,
        "failures": failures,
        "status": "pass" if failures == 0 else "fail",
    }
    return report, (0 if failures == 0 else 1)


# ---------------------------------------------------------------- rendering

def _render_text(report: dict, out) -> None:
    def walk(d, prefix=""):
        if isinstance(d, dict) and "identity" in d and "status" in d:
            defect = d.get("defect")
            tail = f"defect={defect:.3e}" if defect is not None else d.get("error", "")
            sign = f" sign={d['sign']:+d}" if "sign" in d else ""
            print(f"{prefix}{d['status']:>4}  {d['identity']:<28} {tail}{sign}", file=out)
            return
        if isinstance(d, dict):
            for k, v in d.items():
                if isinstance(v, (dict, list)):
                    print(f"{prefix}{k}:", file=out)
                    walk(v, prefix + "  ")
                else:
                    print(f"{prefix}{k}: {v}", file=out)
            return
        if isinstance(d, list):
            for v in d:
                if isinstance(v, (dict, list)):
                    walk(v, prefix)
                else:
                    print(f"{prefix}{v}", file=out)
            return
        print(f"{prefix}{d}", file=out)

    walk(report)


def _emit(report: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        print(_dump(report), file=out)
    else:
        _render_text(report, out)


# -------------------------------------------------------------------- main

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="secondkind",
        description="Period matrices, theta constants and identity verification "
                    "for genus 1 and 2 hyperelliptic curves.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in [
        ("periods", "first and second kind period matrices with diagnostics"),
        ("theta", "theta-constant table at the curve's tau"),
        ("match", "branch point / odd characteristic correspondence (genus 2)"),
        ("kappa", "kappa by every independent route"),
        ("verify", "run the identity verification suite"),
        ("expand", "projective-connection expansions and kappa recovery"),
    ]:
        q = sub.add_parser(name, help=text)
        q.add_argument("--curve", help="inline curve JSON")
        q.add_argument("--curve-file", help="path to a curve JSON file")
        q.add_argument("--tol", type=float, default=DEFAULT_IDENTITY_TOL,
                       help="identity tolerance (default 1e-8)")
        q.add_argument("--quad-tol", type=float, default=DEFAULT_QUAD_TOL,
                       help="quadrature tolerance (default 1e-12)")
        q.add_argument("--theta-tol", type=float, default=DEFAULT_THETA_TOL,
                       help="theta truncation tolerance (default 1e-14)")
        q.add_argument("--order", type=int, default=DEFAULT_ORDER,
                       help="expansion truncation order (default 12)")
        q.add_argument("--format", choices=("json", "text"), default="json")
        q.add_argument("--seed", type=int, default=0,
                       help="seed for randomized suite curves and stencil points")
        if name == "verify":
            q.add_argument("--suite", choices=("quick", "full"), default="quick")
    return p


def run(args) -> int:
    if args.command == "verify":
        report, code = _verify(args)
        _emit(report, args.format)
        return code

    curve = _load_curve(args)
    if curve is None:
        raise ValueError(f"'{args.command}' requires --curve or --curve-file")
    bundle = compute_periods(curve, args.quad_tol)
    if args.command == "periods":
        _emit(_periods_report(curve, bundle), args.format)
        return 0
    tt = theta_table(bundle, tol=args.theta_tol)
    if args.command == "theta":
        _emit(_theta_report(bundle, tt), args.format)
        return 0
    if args.command == "match":
        if curve.genus != 2:
            raise ValueError("matching is defined for genus-2 curves")
        _emit(_match_report(bolza_match(tt, curve)), args.format)
        return 0
    if args.command == "kappa":
        if curve.genus == 2:
            m = bolza_match(tt, curve)
            _emit(_kappa_report_g2(curve, bundle, tt, m, args.order), args.format)
        else:
            _emit(_kappa_report_g1(curve, bundle, tt, args.order), args.format)
        return 0
    if args.command == "expand":
        m = bolza_match(tt, curve) if curve.genus == 2 else None
        _emit(_expand_report(curve, bundle, tt, m, args.order), args.format)
        return 0
    raise ValueError(f"unknown command {args.command}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return run(args)
    except (SecondKindError, ValueError, OSError) as ex:
        report = {"error": {"type": type(ex).__name__, "message": str(ex)}}
        _emit(report, getattr(args, "format", "json"))
        return 2


if __name__ == "__main__":
    sys.exit(main())
