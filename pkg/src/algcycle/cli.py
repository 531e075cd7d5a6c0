"""Command-line front end.

Exit codes: 0 every check passed, 1 a numerical check failed (or a method
disagreement), 2 usage or parameter-domain error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .errors import AlgCycleError, ConvergenceError, DomainError, IntegrationError, NoOrbitError, PreconditionError
from .systems import (
    ALIASES,
    CATALOG_IDS,
    _PARAMS,
    catalog_instantiate,
    catalog_json,
    cofactor_residual,
    gradient_nonvanishing_check,
    pointwise_residual,
    transform_divergence_check,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
GRADIENT_FLOOR = 1e-8


class UsageError(AlgCycleError):
    pass


@dataclass
class Check:
    name: str
    value: float
    tol: Optional[float]
    passed: bool
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        tol = f" (tol {self.tol:.0e})" if self.tol is not None else ""
        det = f"  {self.detail}" if self.detail else ""
        return f"{tag}  {self.name}: {self.value:.6g}{tol}{det}"

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "tol": self.tol, "pass": self.passed, "detail": self.detail}


# ---------------------------------------------------------------------------
# Parsing helpers
# ---------------------------------------------------------------------------


def parse_number(text: str) -> Fraction:
    """'3/16', '0.125', '-2e-3' -> exact Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a number: {text!r}") from exc


def parse_range(text: str) -> List[Fraction]:
    """start:stop:step, inclusive of stop, in exact arithmetic."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"range must be start:stop:step, got {text!r}")
    start, stop, step = (parse_number(p) for p in parts)
    if step <= 0:
        raise UsageError("range step must be positive")
    if stop < start:
        raise UsageError(f"empty range {text!r}")
    n = int((stop - start) // step) + 1
    return [start + i * step for i in range(n)]


def _params_from_args(entry_id: str, args) -> dict:
    out = {}
    for name in _PARAMS[entry_id]:
        v = getattr(args, name, None)
        if v is not None:
            out[name] = parse_number(v) if name != "n" else int(parse_number(v))
    return out


def _entry(args):
    eid = ALIASES.get(args.system, args.system)
    if eid not in CATALOG_IDS:
        raise UsageError(f"unknown system {args.system!r}; choose from {', '.join(CATALOG_IDS)}")
    return catalog_instantiate(eid, _params_from_args(eid, args))


def _fmt(v) -> str:
    return f"{v:.17g}" if isinstance(v, float) else str(v)


# ---------------------------------------------------------------------------
# Check drivers (also used by the demos)
# ---------------------------------------------------------------------------


def _curve_samples(entry, n=400):
    chart = entry.oval_chart
    if chart is not None:
        return chart.samples(n)
    from .flow import find_periodic_orbit

    orbit = find_periodic_orbit(entry.vector_field(), entry.oval_point(), curve=entry.curve_functions())
    return orbit.points(n)


def transform_samples(entry, n=50, seed=0):
    """Points near the oval of a transformed entry, in (u, v)."""
    chart = entry.oval_chart
    pts = chart.samples(2 * n)
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(pts), size=n, replace=False)
    scale = 0.01 * (chart.tau2 - chart.tau1)
    return pts[np.sort(idx)] + scale * rng.uniform(-1, 1, size=(n, 2))


def verify_checks(entry) -> List[Check]:
    checks: List[Check] = []
    cf = entry.curve_functions()
    if entry.system.transcendental:
        rng = np.random.default_rng(0)
        pts = np.column_stack([rng.uniform(-math.pi / 2, math.pi / 2, 100), rng.uniform(-1, 1, 100)])
        r = pointwise_residual(entry.vector_field(), cf, pts)
        checks.append(Check("pointwise cofactor residual (100 points)", r, 1e-12, r <= 1e-12))
    else:
        res = cofactor_residual(entry.system, entry.curve, entry.exact_param)
        checks.append(Check("exact cofactor residual (number of nonzero terms)", float(len(res.terms)), None,
                            res.is_zero(), "P*f_x + Q*f_y - k*f == 0" if res.is_zero() else str(res)))
    g = gradient_nonvanishing_check(cf, _curve_samples(entry))
    checks.append(Check("min |grad f| on the oval", g, GRADIENT_FLOOR, g > GRADIENT_FLOOR))
    if entry.transform is not None:
        m = entry.transform
        src = entry.source_entry()
        samples = transform_samples(entry)
        dst = m.unreparameterize(entry.vector_field())
        r = transform_divergence_check(m, src.vector_field(), dst, samples)
        checks.append(Check("divergence transformation residual (50 samples)", r, 1e-8, r <= 1e-8))
        worst = 0.0
        for u, v in samples:
            x, y = m.forward(u, v)
            uu, vv = m.inverse(x, y)
            worst = max(worst, math.hypot(uu - u, vv - v) / max(1.0, math.hypot(u, v)))
        checks.append(Check("inverse(forward(p)) - p", worst, 1e-12, worst <= 1e-12))
    return checks


def theorem_checks(entry) -> List[Check]:
    from .flow import find_periodic_orbit, theorem_residual

    orbit = find_periodic_orbit(entry.vector_field(), entry.oval_point(), curve=entry.curve_functions())
    r = theorem_residual(orbit)
    return [Check("|int div - int k|", r, 1e-6, r <= 1e-6,
                  f"int div = {orbit.I_div:.12g}, int k = {orbit.I_k:.12g}, T = {orbit.T:.12g}")]


def monodromy_checks(entry) -> List[Check]:
    from .flow import find_periodic_orbit, monodromy_matrix

    cf = entry.curve_functions()
    orbit = find_periodic_orbit(entry.vector_field(), entry.oval_point(), curve=cf)
    mono = monodromy_matrix(entry.vector_field(), orbit, cf)
    out = [
        Check("Liouville |det M - exp(int div)| / exp(int div)", mono.liouville_residual(), 1e-6,
              mono.liouville_residual() <= 1e-6, f"det M = {mono.nontrivial_multiplier():.12g}"),
        Check("flow eigenvector |M F - F| / |F|", mono.flow_eigen_residual(), 1e-5, mono.flow_eigen_residual() <= 1e-5),
    ]
    le = mono.left_eigen_residual(cf.gradient(*orbit.p0))
    out.append(Check("left eigenvector |grad f M - exp(int k) grad f| / |grad f|", le, 1e-5, le <= 1e-5))
    return out


def default_grid(lo: float, hi: float, n: int = 50) -> List[float]:
    return [lo + (hi - lo) * (i + 1) / (n + 1) for i in range(n)]


def elliptic_rows(ch2_grid=None, fil_grid=None):
    """(identity, param, residual, scaled residual, pass) rows."""
    from .elliptic import identity_relch2, identity_relfil, relch2_derivative_residual

    rows = []
    for a in ch2_grid or default_grid(0.0, 0.25):
        s = identity_relch2(a, scaled=True)
        rows.append(("relch2", a, identity_relch2(a), s, s <= 1e-10))
        d = relch2_derivative_residual(a, scaled=True)
        rows.append(("relch2_derivative", a, relch2_derivative_residual(a), d, d <= 1e-8))
    for c in fil_grid or default_grid(0.0, 0.5):
        s = identity_relfil(c, scaled=True)
        rows.append(("relfil", c, identity_relfil(c), s, s <= 1e-10))
    return rows


def fuchs_rows(grid=None):
    from .elliptic import D_BOUNDARY, D_closed_form, fuchs_residual

    rows = []
    for a in grid or default_grid(0.0, 0.25):
        s = fuchs_residual(a, scaled=True)
        rows.append(("fuchs", a, fuchs_residual(a), s, s <= 1e-8))
    quarter = Fraction(1, 4)
    for order, exact in D_BOUNDARY.items():
        v = D_closed_form(quarter, order)
        err = abs(v - exact) if exact == 0 else abs(v - exact) / abs(exact)
        rows.append((f"D^({order})(1/4)", 0.25, v, err, err <= 1e-9))
    return rows


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _emit_checks(checks: Sequence[Check], args, header: str) -> int:
    ok = all(c.passed for c in checks)
    if getattr(args, "json", False):
        print(json.dumps({"schema": 1, "command": header, "pass": ok, "checks": [c.to_dict() for c in checks]},
                         indent=2))
    else:
        print(header)
        for c in checks:
            print("  " + c.line())
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    entry = _entry(args)
    header = f"verify {entry.id} {', '.join(f'{k}={v}' for k, v in entry.params.items())}"
    return _emit_checks(verify_checks(entry), args, header)


def cmd_hyperbolicity(args) -> int:
    from .ovalquad import hyperbolicity

    entry = _entry(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    alias = {"closed_form": "closed", "reduced_quadrature": "reduced", "raw_quadrature": "raw"}
    methods = [alias.get(m, m) for m in methods]
    rep = hyperbolicity(entry, methods, rel_tol=args.rel_tol)
    if args.json:
        d = rep.to_dict()
        d.update(schema=1, disagreements=rep.disagreements())
        print(json.dumps(d, indent=2))
    else:
        print(f"hyperbolicity {entry.id} {', '.join(f'{k}={v}' for k, v in entry.params.items())}")
        for m, r in rep.results.items():
            extra = f"  (original system: {r.D_original:.15g})" if r.D_original != r.D else ""
            print(f"  D[{m}] = {r.D:.15g}  error ~ {r.error:.1e}{extra}")
        for n in rep.notes:
            print(f"  note: {n}")
        for d in rep.disagreements():
            print(f"  DISAGREE {d}")
        print(f"  agree: {'yes' if rep.agree else 'no'}")
        target = "original system" if entry.source_id else "system"
        print(f"  verdict ({target}): {rep.verdict}")
        if rep.expected is not None:
            print(f"  expected: {rep.expected} ({'match' if rep.matches_expected else 'MISMATCH'})")
    ok = rep.agree and rep.matches_expected is not False
    return EXIT_OK if ok else EXIT_FAIL


def _sweep_row(job):
    entry_id, value, methods = job
    from .ovalquad import hyperbolicity

    name = _PARAMS[entry_id][0]
    try:
        rep = hyperbolicity(catalog_instantiate(entry_id, {name: value}), methods)
    except AlgCycleError as exc:
        return [str(value)] + [""] * 9 + [f"error: {type(exc).__name__}: {exc}"], False
    r = rep.results
    get = lambda m, a: _fmt(getattr(r[m], a)) if m in r else ""
    ok = rep.agree and rep.matches_expected is not False
    status = "ok" if ok else ("disagree" if not rep.agree else "verdict mismatch")
    return [str(value), get("reduced", "D"), get("raw", "D"), get("ode", "D"), get("closed", "D"),
            get("reduced", "error"), get("raw", "error"), get("ode", "error"),
            "true" if rep.agree else "false", rep.verdict, status], ok


def cmd_sweep(args) -> int:
    import csv
    import io

    from .ovalquad import SWEEP_COLUMNS

    eid = ALIASES.get(args.system, args.system)
    if eid not in CATALOG_IDS or len(_PARAMS[eid]) != 1 or eid == "nalc":
        raise UsageError(f"sweep needs a one-parameter family, got {args.system!r}")
    values = parse_range(args.range)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    jobs = [(eid, v, methods) for v in values]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_row, jobs))
    else:
        results = [_sweep_row(j) for j in jobs]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row, _ in results:
        w.writerow(row)
    text = buf.getvalue()
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
        print(f"wrote {len(results)} rows to {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(ok for _, ok in results) else EXIT_FAIL


def cmd_checks(args) -> int:
    kind = args.kind
    if kind in ("theorem", "monodromy"):
        if args.system is None:
            raise UsageError(f"checks {kind} needs --system")
        entry = _entry(args)
        checks = theorem_checks(entry) if kind == "theorem" else monodromy_checks(entry)
        header = f"checks {kind} {entry.id} {', '.join(f'{k}={v}' for k, v in entry.params.items())}"
        return _emit_checks(checks, args, header)
    if kind == "elliptic":
        rows = elliptic_rows(parse_range(args.grid) if args.grid else None,
                             parse_range(args.fil_grid) if args.fil_grid else None)
        tol = {"relch2": 1e-10, "relch2_derivative": 1e-8, "relfil": 1e-10}
    else:
        rows = fuchs_rows(parse_range(args.grid) if args.grid else None)
        tol = {"fuchs": 1e-8}
    checks = [Check(f"{name} at {float(p):.6g} (scaled)", float(s), tol.get(name, 1e-9), bool(ok))
              for name, p, _, s, ok in rows]
    return _emit_checks(checks, args, f"checks {kind}: {len(rows)} points")


def cmd_elliptic_check(args) -> int:
    import csv
    import io

    rows = elliptic_rows(parse_range(args.grid) if args.grid else None,
                         parse_range(args.fil_grid) if args.fil_grid else None)
    if args.fuchs:
        rows += fuchs_rows()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["identity", "param", "residual", "scaled_residual", "pass"])
    for name, p, r, s, ok in rows:
        w.writerow([name, _fmt(float(p)), _fmt(float(r)), _fmt(float(s)), "true" if ok else "false"])
    text = buf.getvalue()
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(r[4] for r in rows) else EXIT_FAIL


def cmd_catalog(args) -> int:
    entries = []
    defaults = {
        "nalc": {"n": 0},
        "chin2": {"a": 1, "b": 0, "c": 2},
        "yablonskii": {"a": 1, "b": 2, "c": Fraction(1, 2)},
        "filipstov": {"a": Fraction(1, 10)},
        "chavarriga": {"a": Fraction(-1, 50)},
        "chlls": {"a": Fraction(1, 8)},
        "fil_transformed": {"c": Fraction(3, 10)},
        "ch1_transformed": {"a": Fraction(-1, 50)},
    }
    for eid in CATALOG_IDS:
        entries.append(catalog_instantiate(eid, defaults[eid]))
    text = json.dumps(catalog_json(entries), indent=2)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_orbit(args) -> int:
    from .flow import find_periodic_orbit

    entry = _entry(args)
    orbit = find_periodic_orbit(entry.vector_field(), entry.oval_point(), curve=entry.curve_functions())
    text = orbit.to_csv(n=args.samples)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
        print(f"T = {orbit.T:.15g}, int div = {orbit.I_div:.15g}, orientation {orbit.orientation}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_system(p, required=True):
    p.add_argument("--system", required=required, help=f"one of {', '.join(CATALOG_IDS)} (aliases: "
                   + ", ".join(f"{k}={v}" for k, v in ALIASES.items()) + ")")
    for name in ("a", "b", "c", "n"):
        p.add_argument(f"--{name}", help=f"parameter {name} (exact: 3/16, or decimal)")
    p.add_argument("--json", action="store_true", help="machine-readable report")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="algcycle", description="Hyperbolicity of algebraic limit cycles.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify", help="exact cofactor, gradient and change-of-variables checks")
    _add_system(s)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("hyperbolicity", help="D = int div dt by several methods, with a stability verdict")
    _add_system(s)
    s.add_argument("--methods", default="ode,reduced,raw,closed", help="comma list of ode, reduced, raw, closed")
    s.add_argument("--rel-tol", type=float, default=1e-5, help="agreement tolerance between methods")
    s.set_defaults(func=cmd_hyperbolicity)

    s = sub.add_parser("sweep", help="hyperbolicity over a parameter range, as CSV")
    s.add_argument("--system", required=True)
    s.add_argument("--range", required=True, help="start:stop:step (inclusive)")
    s.add_argument("--methods", default="ode,reduced,raw,closed")
    s.add_argument("--output", "-o", help="CSV path (default stdout)")
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("checks", help="theorem, monodromy, elliptic or fuchs checks")
    s.add_argument("kind", choices=["theorem", "monodromy", "elliptic", "fuchs"])
    _add_system(s, required=False)
    s.add_argument("--grid", help="start:stop:step parameter grid (elliptic: chlls a; fuchs: a)")
    s.add_argument("--fil-grid", help="start:stop:step grid of c for the Filipstov identity")
    s.set_defaults(func=cmd_checks)

    s = sub.add_parser("elliptic-check", help="CSV table of identity residuals")
    s.add_argument("--grid", help="grid of a for the chlls identity")
    s.add_argument("--fil-grid", help="grid of c for the Filipstov identity")
    s.add_argument("--fuchs", action="store_true", help="also tabulate the Fuchs equation")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_elliptic_check)

    s = sub.add_parser("catalog", help="dump the catalog as JSON")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("orbit", help="export one period of the limit cycle as CSV")
    _add_system(s)
    s.add_argument("--samples", type=int, default=None, help="uniform samples in time (default: solver steps)")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_orbit)
    return p


_VALUE_FLAGS = {"--a", "--b", "--c", "--n", "--range", "--grid", "--fil-grid"}


def _join_negative_values(argv: Sequence[str]) -> List[str]:
    """Turn ['--a', '-1/50'] into ['--a=-1/50'] so argparse does not read a flag."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and len(argv[i + 1]) > 1 \
                and (argv[i + 1][1].isdigit() or argv[i + 1][1] == "."):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(_join_negative_values(argv))
    try:
        return args.func(args)
    except (UsageError, DomainError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IntegrationError, NoOrbitError, ConvergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
