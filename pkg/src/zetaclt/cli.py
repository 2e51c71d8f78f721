"""Command line entry point: ``zetaclt <subcommand> [options]``.

Every subcommand writes one CSV (comma separated, header row, 17 significant
digits) to --out or stdout.

Subcommands and their CSV columns:

  metrics         family,delta,g,kolmogorov,zeta1,nu0,nu_2_plus_delta,nu_2g,zeta2_lower,zeta2_upper,lower_method,flags
  bounds          bound_name,delta,n,params,lhs,rhs_lower,rhs_upper,valid,tightness
  constants       name,computed,closed_form,paper_value,abs_err,printed_err,tolerance,ok
  sharpness       eps,a_eps,nu_2g1,closed_form,abs_diff,excess_over_23_27
  counterexample  a,kappa,t,lambda,b,lower_direct,...,ratio,ratio_direct_upper,limit
  scan            family,delta,n,bound,lhs,rhs_lower,rhs_upper,valid,tight,tightness
  verify          property,seed,passed,worst_margin,checked,seconds

Exit codes: 0 success, 2 property or bound violation, 3 bad parameters,
4 resource cap.

A config file (--config) holds flat ``key = value`` lines using the long
option names (``grid-points`` or ``grid_points``); options given on the
command line win over the file.
"""

from __future__ import annotations

import argparse
import sys
import warnings

from . import constants as cst
from .bounds import LawContext, katz_bound, lyapunov_katz, senatov_bound, thm11_bound, thm12a_bound, thm12b_bound
from .errors import GapNotReached, InadmissibleParams, ZetaCLTError, ZetaTooLarge
from .families import DEFAULT_DELTAS, DEFAULT_SCAN_FAMILIES, LawFamily
from .gfun import MinIdPower, parse_g
from .measure import nu, nu_mg, variation_nu0
from .metrics import kolmogorov, zeta1_exact, zeta2delta_interval
from .properties import PROPERTY_COLUMNS, perturbation_selftest, run_property_suite
from .report import REPORT_COLUMNS, report_row, write_csv
from .scenarios import (COUNTEREXAMPLE_COLUMNS, SCAN_COLUMNS, SHARPNESS_COLUMNS, CounterexampleConfig,
                        run_clt_scan, run_counterexample, run_sharpness_2327, sharpness_ok)
from .zeta_lp import GridSpec, lp_sandwich

EXIT_OK, EXIT_VIOLATION, EXIT_BAD_PARAMS = 0, 2, 3

DEFAULTS = {
    "delta": None,
    "n": None,
    "family": None,
    "g": None,
    "out": None,
    "seed": "0",
    "grid_points": None,
    "gap": "0.05",
    "eps": "0.1,0.01,0.001,0.0001",
    "a": "0.1",
    "kappa": "0.01",
    "t": "1e4,1e5,1e6",
    "seeds": "8",
    "samples": "100000",
    "thm11_c": "48",
    "senatov_c": "48",
    "perturb": None,
}

METRICS_COLUMNS = ["family", "delta", "g", "kolmogorov", "zeta1", "nu0", "nu_2_plus_delta", "nu_2g",
                   "zeta2_lower", "zeta2_upper", "lower_method", "flags"]
CONSTANTS_COLUMNS = ["name", "computed", "closed_form", "paper_value", "abs_err", "printed_err", "tolerance", "ok"]


def read_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key = key.strip().replace("-", "_")
            if key not in DEFAULTS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = val.strip()
    return out


def _floats(text) -> list:
    return [float(x) for x in str(text).split(",") if x.strip()]


def _families(text) -> list:
    """Families are separated by ';' since parameters use ','."""
    return [LawFamily.parse(x) for x in str(text).split(";") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; command line options win")
    common.add_argument("--out", help="CSV destination (default stdout)")
    common.add_argument("--delta", help="delta in [0,1], comma list for scan")
    common.add_argument("--n", help="sample size (bounds) or n_max (scan)")
    common.add_argument("--family", help="law family, e.g. rademacher, two_point:0.1,1, q_t:3; ';' separated for scan")
    common.add_argument("--g", help="modulus, e.g. power:0.5, clip:2, min(clip:2,power:1)")
    common.add_argument("--seed", help="base seed")
    common.add_argument("--grid-points", dest="grid_points", help="LP grid size (metrics uses the LP sandwich if set)")
    common.add_argument("--gap", help="target relative gap of the LP sandwich")

    parser = argparse.ArgumentParser(prog="zetaclt", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("metrics", parents=[common], help="norms of P~ - N for one family")
    sub.add_parser("bounds", parents=[common], help="every bound for one (family, delta, n)")
    sub.add_parser("constants", parents=[common], help="all numerical constants")
    p = sub.add_parser("sharpness", parents=[common], help="the 23/27 sharpness family")
    p.add_argument("--eps", help="comma list of eps in (0,1]")
    p = sub.add_parser("counterexample", parents=[common], help="scaling counterexample ratios")
    p.add_argument("--a")
    p.add_argument("--kappa")
    p.add_argument("--t", help="comma list of t values")
    p = sub.add_parser("scan", parents=[common], help="bound validity over families x deltas x n")
    p.add_argument("--thm11-c", dest="thm11_c")
    p.add_argument("--senatov-c", dest="senatov_c")
    p = sub.add_parser("verify", parents=[common], help="run the randomised property suite")
    p.add_argument("--seeds", help="number of seeds, starting at --seed")
    p.add_argument("--samples", help="samples per sampled property")
    p.add_argument("--perturb", help="diagnostic: rerun the scan with this thm11 constant and list invalid rows")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    opts = dict(DEFAULTS)
    if getattr(args, "config", None):
        opts.update(read_config(args.config))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
    return opts


# -- subcommands ------------------------------------------------------------------------


def cmd_metrics(o):
    fam = _families(o["family"] or "rademacher")[0]
    delta = _floats(o["delta"] or "1")[0]
    g = parse_g(o["g"]) if o["g"] else MinIdPower(delta)
    ctx = LawContext(fam.gen(), fam.label)
    if o["grid_points"]:
        grid = GridSpec.for_measure(ctx.diff, int(o["grid_points"]))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", GapNotReached)
            z2 = lp_sandwich(ctx.diff, delta, target_gap=float(o["gap"]), grid=grid)
    else:
        z2 = zeta2delta_interval(ctx.diff, delta)
    row = [fam.label, delta, str(g), kolmogorov(ctx.diff), zeta1_exact(ctx.diff), variation_nu0(ctx.diff),
           nu(ctx.tilde, 2.0 + delta), nu_mg(ctx.tilde, 2, g), z2.lower, z2.upper, z2.lower_method,
           "|".join(z2.flags)]
    return [row], METRICS_COLUMNS, EXIT_OK


def cmd_bounds(o):
    fam = _families(o["family"] or "rademacher")[0]
    delta = _floats(o["delta"] or "1")[0]
    n = int(o["n"] or 16)
    g = parse_g(o["g"]) if o["g"] else MinIdPower(delta)
    ctx = LawContext(fam.gen(), fam.label)
    reps = [katz_bound(ctx, g, n), lyapunov_katz(ctx, delta, n)]
    if n >= 2:
        reps.append(thm11_bound(ctx, delta, n))
    reps.append(thm12a_bound(ctx, delta, n))
    try:
        reps.append(thm12b_bound(ctx, delta, n))
    except (InadmissibleParams, ZetaTooLarge) as exc:
        print(f"thm12b skipped: {exc}", file=sys.stderr)
    reps.append(senatov_bound(ctx, delta, n))
    code = EXIT_OK if all(r.valid for r in reps) else EXIT_VIOLATION
    return [report_row(r) for r in reps], REPORT_COLUMNS, code


def cmd_constants(o):
    rows, ok = [], True
    for c in cst.all_constants():
        rows.append([c.name, c.computed, "" if c.closed_form is None else c.closed_form,
                     "" if c.paper_value is None else c.paper_value, c.abs_err,
                     "" if c.printed_err is None else c.printed_err, c.tolerance, c.ok])
        ok &= c.ok
    return rows, CONSTANTS_COLUMNS, EXIT_OK if ok else EXIT_VIOLATION


def cmd_sharpness(o):
    rows = run_sharpness_2327(_floats(o["eps"]))
    return rows, SHARPNESS_COLUMNS, EXIT_OK if sharpness_ok(rows) else EXIT_VIOLATION


def cmd_counterexample(o):
    cfg = CounterexampleConfig(float(o["a"]), float(o["kappa"]), max(_floats(o["t"])))
    return run_counterexample(cfg, _floats(o["t"])), COUNTEREXAMPLE_COLUMNS, EXIT_OK


def cmd_scan(o):
    fams = _families(o["family"]) if o["family"] else list(DEFAULT_SCAN_FAMILIES)
    deltas = _floats(o["delta"]) if o["delta"] else list(DEFAULT_DELTAS)
    res = run_clt_scan(fams, deltas, n_max=int(o["n"] or 64), thm11_c=float(o["thm11_c"]),
                       senatov_c=float(o["senatov_c"]))
    for name, s in sorted(res.summary.items()):
        print(f"{name}: {s['cells']} cells, {s['violations']} violations, max tightness {s['max_tightness']:.4g}",
              file=sys.stderr)
    for name, k in sorted(res.skipped.items()):
        print(f"{name}: {k} cells skipped (inadmissible)", file=sys.stderr)
    return res.rows, SCAN_COLUMNS, EXIT_OK if res.violations == 0 else EXIT_VIOLATION


def cmd_verify(o):
    if o["perturb"]:
        bad = perturbation_selftest(c=float(o["perturb"]))
        print(f"perturbed constant: {len(bad)} invalid rows reported", file=sys.stderr)
        return [report_row(r) for r in bad], REPORT_COLUMNS, EXIT_OK
    base = int(o["seed"])
    seeds = range(base, base + int(o["seeds"]))
    res = run_property_suite(seeds=seeds, samples=int(o["samples"]))
    rows = [[r.name, r.seed, r.passed, r.worst_margin, r.checked, round(r.seconds, 3)] for r in res]
    failed = sorted({r.name for r in res if not r.passed})
    if failed:
        print("failed: " + ", ".join(failed), file=sys.stderr)
    return rows, PROPERTY_COLUMNS, EXIT_VIOLATION if failed else EXIT_OK


COMMANDS = {
    "metrics": cmd_metrics,
    "bounds": cmd_bounds,
    "constants": cmd_constants,
    "sharpness": cmd_sharpness,
    "counterexample": cmd_counterexample,
    "scan": cmd_scan,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        opts = resolve(args)
        rows, header, code = COMMANDS[args.command](opts)
    except ZetaCLTError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    if opts["out"]:
        with open(opts["out"], "w", newline="") as fh:
            write_csv(rows, header, fh)
    else:
        write_csv(rows, header, sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
