"""Command-line interface.

Exit codes: 0 success, 1 domain error (the model rejected the input), 2 usage
error (a flag could not be parsed).  Global options --seed and --threads fall
back to SVL_SEED and SVL_THREADS.
"""
import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import lattice, regularity, restriction, sampler, weights
from .errors import ExtensionError, SixVertexError
from .exact import partition_function
from .extension import ExtensionProblem, extend_with_diagnostics
from .lattice import (BoundaryData, Rect, boundary_of,
                      format_boundary_spec, parse_domain, read_ensemble, write_ensemble)

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    def __init__(self, flag, msg):
        super().__init__(f"{flag}: {msg}")
        self.flag = flag


# ----------------------------------------------------------------- parsing


def _floats(flag, text, n=None):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(flag, f"expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(flag, f"expected {n} values, got {len(vals)}")
    return vals


def _fractions(flag, text, n=None):
    try:
        vals = [Fraction(v) for v in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise UsageError(flag, f"expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(flag, f"expected {n} values, got {len(vals)}")
    return vals


def _ints(flag, text, n):
    try:
        vals = [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(flag, f"expected {n} comma-separated integers, got {text!r}") from None
    if len(vals) != n:
        raise UsageError(flag, f"expected {n} values, got {len(vals)}")
    return vals


def _domain(flag, text):
    try:
        return parse_domain(text)
    except ValueError as err:
        raise UsageError(flag, str(err)) from None


def _boundary(flag, text, domain):
    try:
        return lattice.parse_boundary_spec(text, domain)
    except ValueError as err:
        raise UsageError(flag, str(err)) from None


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(name, f"expected an integer, got {raw!r}") from None


def _slope(flag, text):
    s, t = _floats(flag, text, 2)
    return weights.SlopePair(s, t)


# ------------------------------------------------------------------ output


class Output:
    """Resolves output targets: '-' is stdout, relative paths go under --outdir."""

    def __init__(self, outdir):
        self.outdir = outdir

    def path(self, target):
        if target in (None, "-") or os.path.isabs(target) or not self.outdir:
            return target
        return os.path.join(self.outdir, target)

    def write(self, target, text):
        p = self.path(target)
        if p in (None, "-"):
            sys.stdout.write(text)
            return
        d = os.path.dirname(p)
        if d:
            os.makedirs(d, exist_ok=True)
        with open(p, "w", newline="\n") as f:
            f.write(text)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_num(v) for v in r])
    return buf.getvalue()


def _num(v):
    return repr(float(v)) if isinstance(v, float) else v


def _read_text(path):
    if path == "-":
        return sys.stdin.read()
    with open(path) as f:
        return f.read()


def _load(path):
    return read_ensemble(_read_text(path))


# ---------------------------------------------------------------- commands


def cmd_phase(a, out):
    if (a.weights is None) == (a.stochastic is None):
        raise UsageError("--weights/--stochastic", "give exactly one of them")
    if a.stochastic is not None:
        B1, B2 = _floats("--stochastic", a.stochastic, 2)
        p = weights.StochasticParams(B1, B2)
        w = p.weights()
    else:
        w = weights.WeightSystem(*_floats("--weights", a.weights, 6))
        p, _ = weights.to_stochastic(w)
    if a.slope is None and a.curve_samples is None:
        raise UsageError("--slope/--curve-samples", "nothing to do")
    text = ""
    if a.slope is not None:
        text += weights.classify_slope(w, _slope("--slope", a.slope)).value + "\n"
    if a.curve_samples is not None:
        if a.curve_samples < 1:
            raise UsageError("--curve-samples", "must be at least 1")
        text += _csv(["s", "t", "curve"], weights.phase_curves(p, a.curve_samples))
    out.write(a.out, text)


def cmd_exact(a, out):
    d = _domain("--domain", a.domain)
    ent, _ = _boundary("--entrance", a.entrance, d)
    ex = None
    if a.exit is not None:
        _, ex = _boundary("--exit", a.exit, d)
        ex = ex or []
    vals = (_fractions if a.backend == "rational" else _floats)("--weights", a.weights, 6)
    w = weights.WeightSystem(*vals)
    r = partition_function(d, w, ent, ex, backend=a.backend)
    lines = [f"log_Z = {r.log_Z!r}", f"count = {r.ensemble_count}"]
    if r.Z_rational is not None:
        z = r.Z_rational
        lines.append(f"Z = {z.numerator}/{z.denominator}" if z.denominator != 1 else f"Z = {z}")
    out.write(a.out, "\n".join(lines) + "\n")


def _entrance_model(flag, text, d):
    kind, _, rest = text.partition(":")
    if kind == "explicit":
        ent, _ = _boundary(flag, rest, d)
        return sampler.Explicit(ent)
    if kind == "bernoulli":
        r1, r2 = _floats(flag, rest, 2)
        return sampler.DoubleSidedBernoulli(r1, r2)
    if kind == "mu":
        return ("mu", _floats(flag, rest, 1)[0])
    raise UsageError(flag, f"expected explicit:<spec>, bernoulli:r1,r2 or mu:rho, got {text!r}")


def cmd_sample(a, out):
    d = _domain("--domain", a.domain)
    p = weights.StochasticParams(a.B1, a.B2)
    if a.reps < 1:
        raise UsageError("--reps", "must be at least 1")
    model = _entrance_model("--entrance", a.entrance, d)
    if isinstance(model, tuple):
        spec = sampler.mu_spec(p, model[1], d, a.seed)
    else:
        spec = sampler.SamplerSpec(p, d, model, a.seed)
    if a.reps == 1:
        ens = [sampler.sample(spec)]
    else:
        ens = sampler.sample_many(spec, a.reps, threads=a.threads)
    if a.format == "stats":
        rows = []
        for r, e in enumerate(ens):
            st = regularity.slope_estimate(e)
            rows.append((r, st.s, st.t))
        out.write(a.out, _csv(["rep", "slope_v", "slope_h"], rows))
    else:
        out.write(a.out, "".join(write_ensemble(e) for e in ens))


def cmd_restrict(a, out):
    p = restriction.RestrictionParams(a.L, a.K)
    if a.boundary_only:
        if a.domain is None:
            raise UsageError("--domain", "required with --boundary-only")
        d = _domain("--domain", a.domain)
        text = a.boundary if a.boundary is not None else _read_text(a.input or "-")
        ent, ex = _boundary("--boundary", text, d)
        bd = BoundaryData.build(d, ent, ex)
        out.write(a.out, format_boundary_spec(restriction.restrict_boundary(bd, p)) + "\n")
        return
    if a.input is None:
        raise UsageError("--in", "an ensemble file is required")
    e = _load(a.input)
    lattice.require_valid(e)
    out.write(a.out, write_ensemble(restriction.restrict_ensemble(e, p)))


def cmd_extend(a, out):
    inner = _load(a.inner)
    outer_dom = Rect(1, a.N + 2 * a.W, 1, a.N + 2 * a.W)
    ent, ex = _boundary("--outer", a.outer, outer_dom)
    bd = BoundaryData.build(outer_dom, ent, ex or [])
    prob = ExtensionProblem(a.N, a.W, bd, inner, a.R, a.eta, _slope("--slope", a.slope))
    e, diag = extend_with_diagnostics(prob)
    if not a.timings:
        # wall-clock numbers would break byte-identical reruns
        diag["stage_timings"] = None
    out.write(a.out, write_ensemble(e))
    if a.diagnostics:
        out.write(a.diagnostics, json.dumps(diag, sort_keys=True, indent=2) + "\n")


def cmd_stats(a, out):
    ens = [_load(p) for p in a.input]
    if a.slope:
        rows = []
        for e in ens:
            win = e.domain
            if a.window is not None:
                x1, x2, y1, y2 = _ints("--window", a.window, 4)
                win = Rect(x1, x2, y1, y2)
            st = regularity.slope_estimate(e, win)
            rows.append((st.s, st.t))
        out.write(a.out, _csv(["slope_v", "slope_h"], rows))
        return
    if a.pattern is None or a.grid is None:
        raise UsageError("--pattern/--grid", "both are required unless --slope is given")
    pat = _load(a.pattern)
    K, M, Y, k = _ints("--grid", a.grid, 4)
    g = regularity.GridSpec(K, M, Y, k)
    rows = []
    for e in ens:
        s = a.s if a.s is not None else regularity.slope_estimate(e).s
        psi = regularity.psi_values(e, pat, g)
        for i in range(1, g.K ** 2 + 1):
            rows.append((i, int(psi[i - 1]), int(regularity.theta_event(e, i, g, a.eta, s))))
    out.write(a.out, _csv(["i", "psi", "theta"], rows))


def cmd_convert(a, out):
    e = _load(a.input)
    if a.validate:
        lattice.require_valid(e)
    if a.to == "boundary":
        out.write(a.out, format_boundary_spec(boundary_of(e)) + "\n")
    else:
        out.write(a.out, write_ensemble(e))


def cmd_verify(a, out):
    from .verify import run_suite

    only = None
    if a.criteria:
        only = _ints("--criteria", a.criteria, len(a.criteria.split(",")))
        bad = [n for n in only if not 1 <= n <= 12]
        if bad:
            raise UsageError("--criteria", f"unknown criterion {bad[0]}")
    echo = None if a.json == "-" else print
    res = run_suite(a.level, only=only, threads=a.threads, echo=echo)
    if a.json:
        rep = {"level": a.level, "passed": all(r.passed for r in res),
               "criteria": [r.as_dict() for r in res]}
        out.write(a.json, json.dumps(rep, indent=2) + "\n")
    return EXIT_OK if all(r.passed for r in res) else EXIT_DOMAIN


# ------------------------------------------------------------------ parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master seed (env SVL_SEED)")
    common.add_argument("--threads", type=int, default=None, help="worker count (env SVL_THREADS)")
    common.add_argument("--outdir", default=None, help="directory for relative output paths")
    common.add_argument("--out", default="-", help="output file, '-' for stdout")

    ap = argparse.ArgumentParser(prog="sixvertex", description="Stochastic six-vertex toolkit.")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")

    s = sub.add_parser("phase", parents=[common], help="classify a slope, print phase curves")
    s.add_argument("--weights")
    s.add_argument("--stochastic")
    s.add_argument("--slope")
    s.add_argument("--curve-samples", type=int)
    s.set_defaults(func=cmd_phase)

    s = sub.add_parser("exact", parents=[common], help="exact partition function")
    s.add_argument("--domain", required=True)
    s.add_argument("--entrance", required=True)
    s.add_argument("--exit")
    s.add_argument("--weights", required=True)
    s.add_argument("--backend", choices=("float", "rational", "transfer"), default="float")
    s.set_defaults(func=cmd_exact)

    s = sub.add_parser("sample", parents=[common], help="sample the stochastic model")
    s.add_argument("--B1", type=float, required=True)
    s.add_argument("--B2", type=float, required=True)
    s.add_argument("--domain", required=True)
    s.add_argument("--entrance", required=True)
    s.add_argument("--reps", type=int, default=1)
    s.add_argument("--format", choices=("ensemble", "stats"), default="ensemble")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("restrict", parents=[common], help="(L; K)-restriction")
    s.add_argument("--in", dest="input")
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--K", type=int, required=True)
    s.add_argument("--boundary-only", action="store_true")
    s.add_argument("--boundary")
    s.add_argument("--domain")
    s.set_defaults(func=cmd_restrict)

    s = sub.add_parser("extend", parents=[common], help="extend an inner ensemble outward")
    s.add_argument("--outer", required=True)
    s.add_argument("--inner", required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--W", type=int, required=True)
    s.add_argument("--slope", required=True)
    s.add_argument("--eta", type=float, required=True)
    s.add_argument("--R", type=int, required=True)
    s.add_argument("--diagnostics", help="JSON diagnostics file")
    s.add_argument("--timings", action="store_true", help="record stage timings in diagnostics")
    s.set_defaults(func=cmd_extend)

    s = sub.add_parser("stats", parents=[common], help="shift averages, events and slopes")
    s.add_argument("--in", dest="input", nargs="+", required=True)
    s.add_argument("--pattern")
    s.add_argument("--grid")
    s.add_argument("--eta", type=float, default=0.1)
    s.add_argument("--s", type=float, default=None, help="target slope for theta (default: estimate)")
    s.add_argument("--slope", action="store_true")
    s.add_argument("--window")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("convert", parents=[common], help="re-emit an ensemble file")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--to", choices=("ensemble", "boundary"), default="ensemble")
    s.add_argument("--validate", action="store_true")
    s.set_defaults(func=cmd_convert)

    s = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    s.add_argument("--level", choices=("fast", "full"), default="fast")
    s.add_argument("--criteria", help="comma-separated criterion numbers")
    s.add_argument("--json", help="write a JSON report here")
    s.set_defaults(func=cmd_verify)
    return ap


def run(argv=None):
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        ap.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        a = ap.parse_args(argv)
    except SystemExit as err:
        return EXIT_OK if err.code == 0 else EXIT_USAGE
    if a.command is None:
        ap.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        a.seed = a.seed if a.seed is not None else _env_int("SVL_SEED", 0)
        a.threads = a.threads if a.threads is not None else _env_int("SVL_THREADS", 1)
        if a.threads < 1:
            raise UsageError("--threads", "must be at least 1")
        code = a.func(a, Output(a.outdir))
        return EXIT_OK if code is None else code
    except UsageError as err:
        print(f"sixvertex {a.command}: usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (SixVertexError, ExtensionError, ValueError, TypeError, OSError) as err:
        print(f"sixvertex {a.command}: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_DOMAIN


def main():
    sys.exit(run())
