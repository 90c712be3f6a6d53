"""The acceptance suite: twelve numbered checks with a fast and a full level.

Each check returns ``(passed, detail)``; :func:`run_suite` times them and
collects :class:`CriterionResult` records.  The fast level caps Monte Carlo
runs at 10^4 samples and lattices at 128^2; where a sample size shrinks, the
statistical tolerance is widened by sqrt(n_full / n_fast) so the check keeps
the same power in units of standard errors.

``hooks`` lets a caller swap internals for fault injection, e.g.
``{"stochastic_table": broken_table}``.
"""
import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact, lattice, regularity, restriction, sampler, weights
from .extension import ExtensionProblem, extend_with_diagnostics, fill_monotone
from .errors import MonotoneViolation
from .lattice import CONFIGS, BoundaryData, Ensemble, Rect

FAST_SAMPLES = 10_000
FAST_SIDE = 128


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    seconds: float
    budget: float
    detail: dict = field(default_factory=dict)

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        extra = ", ".join(f"{k}={_fmt(v)}" for k, v in self.detail.items() if not isinstance(v, (list, dict)))
        return f"criterion {self.number:2d} {mark}  {self.name}  [{self.seconds:.1f}s]  {extra}"

    def as_dict(self):
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "seconds": round(self.seconds, 3), "budget": self.budget,
                "detail": _jsonable(self.detail)}


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, Fraction)):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


@dataclass
class Context:
    level: str = "fast"
    hooks: dict = field(default_factory=dict)
    threads: int = 1

    @property
    def full(self):
        return self.level == "full"

    def hook(self, name, default):
        return self.hooks.get(name, default)


# ---------------------------------------------------------------- 1. stochastic


def c1_stochasticity(ctx):
    table_fn = ctx.hook("stochastic_table", weights.stochastic_table)
    rng = np.random.default_rng(1)
    params = [(Fraction(1, 5), Fraction(4, 5)), (Fraction(3, 10), Fraction(3, 5))]
    params += [(Fraction(int(a), 997), Fraction(int(b), 997))
               for a, b in rng.integers(1, 997, size=(20, 2))]
    bad = []
    for B1, B2 in params:
        table = table_fn(B1, B2)
        for inc in ((0, 0), (1, 0), (0, 1), (1, 1)):
            out = table.get(inc, {})
            total = sum(out.values(), Fraction(0))
            conserved = all(sum(o) == sum(inc) for o in out)
            if total != 1 or not conserved or any(v < 0 for v in out.values()):
                bad.append((str(B1), str(B2), inc, str(total)))
    return not bad, {"param_sets": len(params), "violations": len(bad), "first": bad[:3]}


# -------------------------------------------------------- 2. free-exit Z = 1


def _entrance_sites(d):
    return [(x, d.y_min - 1) for x in range(d.x_min, d.x_max + 1)] + \
           [(d.x_min - 1, y) for y in range(d.y_min, d.y_max + 1)]


def c2_free_exit(ctx):
    B1, B2 = Fraction(1, 5), Fraction(4, 5)
    w = weights.WeightSystem.stochastic(B1, B2)
    cases = bad = 0
    for W in range(1, 5):
        for H in range(1, 5):
            d = Rect(1, W, 1, H)
            sites = _entrance_sites(d)
            for mask in range(1 << len(sites)):
                ent = [s for k, s in enumerate(sites) if mask >> k & 1]
                r = exact.partition_function(d, w, ent, backend="rational")
                cases += 1
                bad += r.Z_rational != 1
    rng = np.random.default_rng(2)
    d = Rect(1, 5, 1, 5)
    sites = _entrance_sites(d)
    for _ in range(20):
        b1, b2 = (Fraction(int(v), 101) for v in rng.integers(1, 101, size=2))
        ent = [s for s, keep in zip(sites, rng.integers(0, 2, size=len(sites))) if keep]
        r = exact.partition_function(d, weights.WeightSystem.stochastic(b1, b2), ent,
                                     backend="rational")
        cases += 1
        bad += r.Z_rational != 1
    return bad == 0, {"cases": cases, "Z_not_one": bad}


# ------------------------------------------------------------ 3. gauge reduction


def _random_gauge(rng, spread=2.0):
    r, x, y, z = np.exp(rng.uniform(-spread, spread, size=4))
    return weights.GaugeParams(float(r), float(x), float(y), float(z))


def c3_gauge_reduction(ctx):
    rng = np.random.default_rng(3)
    worst = {"map": 0.0, "product": 0.0, "delta": 0.0, "recovered_B": 0.0}
    n = 0
    while n < 1000:
        B1, B2 = sorted(rng.uniform(0.02, 0.98, size=2))
        if B2 - B1 < 1e-3:
            continue
        w = weights.gauge_transform(weights.WeightSystem.stochastic(B1, B2), _random_gauge(rng))
        p, g = weights.to_stochastic(w)
        target = p.weights().as_tuple()
        got = weights.gauge_transform(w, g).as_tuple()
        worst["map"] = max(worst["map"], max(abs(a - b) for a, b in zip(got, target)))
        lhs, rhs = p.B1 * p.B2 * w.a1 * w.a2, w.b1 * w.b2
        worst["product"] = max(worst["product"], abs(lhs - rhs) / abs(rhs))
        d0, d1 = weights.delta(w), weights.delta(p.weights())
        worst["delta"] = max(worst["delta"], abs(d0 - d1) / d0)
        worst["recovered_B"] = max(worst["recovered_B"], abs(p.B1 - B1), abs(p.B2 - B2))
        n += 1
    ref, _ = weights.to_stochastic(weights.WeightSystem(1, 1, 0.2, 0.8, 0.8, 0.2))
    ref_err = max(abs(ref.B1 - 0.2), abs(ref.B2 - 0.8))
    ok = max(worst.values()) < 1e-12 and ref_err < 1e-12
    return ok, dict(systems=n, reference_error=ref_err, **worst)


# ------------------------------------------------------- 4. Gibbs gauge invariance


def c4_gibbs_gauge(ctx):
    rng = np.random.default_rng(4)
    d = Rect(1, 3, 1, 3)
    sites = _entrance_sites(d)
    p = weights.StochasticParams(0.35, 0.65)
    worst = 0.0
    supports = []
    for case in range(50):
        ent = [s for s, keep in zip(sites, rng.integers(0, 2, size=len(sites))) if keep]
        e = sampler.sample(sampler.SamplerSpec(p, d, ent, seed=int(rng.integers(1 << 62))))
        bd = lattice.boundary_of(e)
        w = weights.WeightSystem(*(float(v) for v in rng.uniform(0.2, 2.0, size=6)))
        base = exact.gibbs_conditional(d, w, bd)
        supports.append(len(base))
        for _ in range(20):
            other = exact.gibbs_conditional(d, weights.gauge_transform(w, _random_gauge(rng)), bd)
            worst = max(worst, base.tv(other))
    return worst < 1e-10, {"boundaries": 50, "gauges": 20, "max_tv": worst,
                           "max_support": max(supports)}


# ------------------------------------------------------------- 5. phase geometry


def c5_phase(ctx):
    p = weights.StochasticParams(0.2, 0.8)
    w = p.weights()
    corners = (weights.h_value(w, 0, 0), weights.h_value(w, 1, 1))
    grid = np.linspace(0.0, 1.0, 100)
    mismatches = checked = 0
    for s in grid:
        for t in grid:
            gap = t - weights.phi(p, s)
            if abs(gap) < 1e-9:
                continue
            checked += 1
            mismatches += np.sign(weights.h_value(w, s, t)) != np.sign(gap)
    st = weights.SlopePair(0.25, 0.4)
    cls = weights.classify_slope(w, st)
    proj, theta = weights.project_to_boundary(p, st)
    proj_err = max(abs(proj.s - 0.5), abs(proj.t - 0.8), abs(theta - 0.5))
    ok = (corners == (0.0, 0.0) and mismatches == 0
          and cls is weights.SlopeClass.InteriorLens and proj_err < 1e-12)
    return ok, {"h00": corners[0], "h11": corners[1], "grid_points": checked,
                "sign_mismatches": int(mismatches), "class": cls.value, "projection_error": proj_err}


# ----------------------------------------------------------- 6. sampler exactness


def c6_sampler_exact(ctx):
    from scipy.stats import chisquare

    p = weights.StochasticParams(0.2, 0.8)
    d = Rect(1, 3, 1, 3)
    ent = [(1, 0), (3, 0)]
    n = 100_000 if ctx.full else FAST_SAMPLES
    tol = 0.01 * math.sqrt(100_000 / n)
    law = exact.stochastic_law(d, p, ent)
    keys = {e.bits.tobytes(): k for k, e in enumerate(law)}
    probs = np.array([float(v) for v in law.values()])
    counts = np.zeros(len(keys), dtype=np.int64)
    stray = 0
    spec = sampler.SamplerSpec(p, d, ent, seed=12345)
    seeds = sampler.replica_seeds(spec.seed, n)
    for a in range(0, n, 4096):
        for b in sampler.sample_bits(spec, seeds[a:a + 4096]):
            k = keys.get(np.ascontiguousarray(b).tobytes())
            if k is None:
                stray += 1
            else:
                counts[k] += 1
    tv = 0.5 * (np.abs(counts / n - probs).sum() + stray / n)
    pval = float(chisquare(counts, probs * counts.sum()).pvalue) if not stray else 0.0
    return tv < tol and pval > 1e-3 and not stray, {
        "samples": n, "ensembles": len(keys), "tv": float(tv), "tv_tol": tol,
        "chi2_p": pval, "stray": stray}


# ------------------------------------------------------------------ 7. mu slope


def _lag1(a, b):
    a = a.astype(np.float64).ravel()
    b = b.astype(np.float64).ravel()
    sa, sb = a.std(), b.std()
    if sa == 0 or sb == 0:
        return 0.0
    return float(((a - a.mean()) * (b - b.mean())).mean() / (sa * sb))


def c7_mu_slope(ctx):
    p = weights.StochasticParams(0.2, 0.8)
    side = 512 if ctx.full else FAST_SIDE
    tol = 0.01 * (512 / side)
    win = Rect(1, side, 1, side)
    sv, sh, crow, ccol = [], [], [], []
    for seed in range(20):
        e = sampler.sample_mu_window(p, 0.5, win, seed)
        est = regularity.slope_estimate(e)
        sv.append(est.s)
        sh.append(est.t)
        # vertical-edge indicators along rows, horizontal ones along columns,
        # pooled over the whole window
        crow.append(_lag1(e.i2[:, :-1], e.i2[:, 1:]))
        ccol.append(_lag1(e.j2[:-1, :], e.j2[1:, :]))
    mv, mh = float(np.mean(sv)), float(np.mean(sh))
    corr = (float(np.mean(crow)), float(np.mean(ccol)))
    ok = abs(mv - 0.5) <= tol and abs(mh - 0.8) <= tol and max(map(abs, corr)) <= tol
    return ok, {"side": side, "seeds": 20, "slope_v": mv, "slope_h": mh,
                "lag1_rows": corr[0], "lag1_cols": corr[1], "tol": tol}


# --------------------------------------------------- 8. restriction inequality


def c8_restriction_inequality(ctx):
    N = 3 if ctx.full else 2
    K, L = 2, 1
    M = -(-N // K)
    B1, B2 = Fraction(3, 10), Fraction(6, 10)
    p = weights.StochasticParams(B1, B2)
    rp = restriction.RestrictionParams(L, K)
    const = ((1 - B1) * (1 - B2)) ** (4 * M * N)
    d = Rect(1, N, 1, N)
    sites = _entrance_sites(d)
    checked = failures = 0
    min_ratio = None
    for mask in range(1 << len(sites)):
        ent = [s for k, s in enumerate(sites) if mask >> k & 1]
        bd = BoundaryData.build(d, ent)
        sub = restriction.restrict_boundary(bd, rp)
        law_f = {}
        for e, pr in exact.stochastic_law(d, p, bd.entrance).items():
            f = restriction.restrict_ensemble(e, rp)
            law_f[f] = law_f.get(f, 0) + pr
        law_e = exact.stochastic_law(d, p, sub.entrance)
        for g in set(law_f) | set(law_e):
            lhs, rhs = law_e.get(g, Fraction(0)), const * law_f.get(g, Fraction(0))
            checked += 1
            if lhs < rhs:
                failures += 1
            if rhs > 0:
                ratio = lhs / rhs
                min_ratio = ratio if min_ratio is None else min(min_ratio, ratio)
    return failures == 0, {"N": N, "M": M, "entrance_sets": 1 << len(sites),
                           "targets": checked, "failures": failures,
                           "constant": float(const), "min_lhs_over_rhs": float(min_ratio)}


# --------------------------------------------------- 9. restriction regularity


def _periodic(n, phase):
    return [c for c in range(1, n + 1) if c % 2 == phase]


def periodic_boundary(N, phases):
    """Period-2 data on all four sides of [1, N]^2 (N even)."""
    d = Rect(1, N, 1, N)
    ps, pw, pn, pe = phases
    ent = [(x, 0) for x in _periodic(N, ps)] + [(0, y) for y in _periodic(N, pw)]
    ex = [(x, N + 1) for x in _periodic(N, pn)] + [(N + 1, y) for y in _periodic(N, pe)]
    return BoundaryData.build(d, ent, ex)


def c9_restriction_regularity(ctx):
    rng = np.random.default_rng(9)
    s0 = t0 = 0.5
    eta, omega = 0.05, 0.1
    violations = 0
    failed = []
    for trial in range(100):
        K = int(rng.integers(10, 31))
        L = int(rng.integers(10, K + 1))
        R = int(rng.integers(10, L + 1))
        N = 2 * int(rng.integers(K, 4 * K))
        bd = periodic_boundary(N, tuple(int(v) for v in rng.integers(0, 2, size=4)))
        rep = restriction.check_restriction_regularity(
            bd, restriction.RestrictionParams(L, K), s0, t0, eta, omega, R)
        if not rep.ok:
            violations += 1
            failed.append((trial, N, L, K, R))
    return violations == 0, {"fixtures": 100, "violations": violations, "failed": failed[:5]}


# ------------------------------------------------------------------ 10. extension


def line_grid(domain):
    """Straight paths through every odd column and every odd row."""
    xs = np.arange(domain.x_min, domain.x_max + 1)
    ys = np.arange(domain.y_min, domain.y_max + 1)
    i = np.broadcast_to((xs % 2 == 1)[None, :], (domain.height, domain.width)).astype(np.uint8)
    j = np.broadcast_to((ys % 2 == 1)[:, None], (domain.height, domain.width)).astype(np.uint8)
    return Ensemble.from_planes(domain, i, j, i, j)


def extension_fixture(N, W):
    side = N + 2 * W
    outer = periodic_boundary(side, (1, 1, 1, 1))
    inner = line_grid(Rect(W + 1, N + W, W + 1, N + W))
    return ExtensionProblem(N, W, outer, inner, R=10, eta=0.05, st=weights.SlopePair(0.5, 0.5))


def monotone_oracle_sweep(max_side=4, max_paths=3):
    """Compare fill_monotone with enumeration on every small boundary."""
    cases = mismatches = 0
    for W in range(1, max_side + 1):
        for H in range(1, max_side + 1):
            g = Rect(1, W, 1, H)
            ents = _entrance_sites(g)
            exs = [(x, H + 1) for x in range(1, W + 1)] + [(W + 1, y) for y in range(1, H + 1)]
            for k in range(max_paths + 1):
                for E in itertools.combinations(ents, k):
                    for X in itertools.combinations(exs, k):
                        bd = BoundaryData.build(g, E, X)
                        nonempty = next(iter(exact.enumerate_ensembles(g, bd.entrance, bd.exit)),
                                        None) is not None
                        try:
                            e = fill_monotone(g, bd)
                            ok = _same_boundary(e, bd)
                        except MonotoneViolation:
                            ok = False
                        cases += 1
                        mismatches += ok != nonempty
    return cases, mismatches


def _same_boundary(e, bd):
    got = lattice.boundary_of(e)
    return got.entrance == bd.entrance and got.exit == bd.exit


def c10_extension(ctx):
    N, W = (200, 100) if ctx.full else (FAST_SIDE // 2, FAST_SIDE // 4)
    prob = extension_fixture(N, W)
    out, diag = extend_with_diagnostics(prob)
    valid = not lattice.validate(out, limit=1)
    bd_ok = _same_boundary(out, prob.outer_bd)
    inner_ok = out.restrict(prob.inner_domain) == prob.inner
    cases, mism = monotone_oracle_sweep()
    ok = valid and bd_ok and inner_ok and mism == 0
    return ok, {"N": N, "W": W, "K": [diag[k] for k in ("K1", "K2", "K3", "K4")],
                "valid": valid, "boundary_equal": bd_ok, "inner_equal": inner_ok,
                "oracle_cases": cases, "oracle_mismatches": mism}


# ------------------------------------------------------------ 11. local statistics


def _config_frequencies(bits):
    """bits (n, 4) -> frequency of each configuration code."""
    return np.array([(bits == np.array(c, dtype=np.uint8)).all(axis=1).mean() for c in CONFIGS])


def c11_local_echo(ctx):
    p = weights.StochasticParams(0.2, 0.8)
    N, M = 400, 60
    runs = 10_000
    dom = Rect(N // 2, N, 1, M)
    ent = [(x, 0) for x in range(N // 2, N + 1) if x % 2 == 0]
    spec = sampler.SamplerSpec(p, dom, ent, seed=11)
    seeds = sampler.replica_seeds(spec.seed, runs)
    col, row = N - dom.x_min, M - dom.y_min
    at = np.concatenate([sampler.sample_bits(spec, seeds[a:a + 1000])[:, :, row, col]
                         for a in range(0, runs, 1000)])
    freq = _config_frequencies(at)
    side = 512 if ctx.full else FAST_SIDE
    nwin = 4
    ref = np.zeros(6)
    for seed in range(nwin):
        e = sampler.sample_mu_window(p, 0.5, Rect(1, side, 1, side), 1000 + seed)
        ref += np.asarray(lattice.config_counts(e)) / e.domain.area
    ref /= nwin
    sigma = np.sqrt(freq * (1 - freq) / runs)
    gap = np.abs(freq - ref)
    ok = bool((gap <= 0.02 + 3 * sigma).all())
    return ok, {"runs": runs, "max_gap": float(gap.max()),
                "max_allowed_at_worst": float((0.02 + 3 * sigma)[gap.argmax()]),
                "frequencies": freq.round(4).tolist(), "reference": ref.round(4).tolist()}


# ------------------------------------------------------------- 12. shift averages


def c12_shift_average(ctx):
    p = weights.StochasticParams(0.2, 0.8)
    K = 8
    M = 64 if ctx.full else FAST_SIDE // K
    g = regularity.GridSpec(K, M, -(-M // 2), 0)
    win = Rect(1, g.N, 1, g.N)
    shift = np.zeros(6)
    direct = np.zeros(6)
    pats = [regularity.single_vertex_pattern(c) for c in range(6)]
    for seed in range(20):
        e = sampler.sample_mu_window(p, 0.5, win, seed)
        direct += np.asarray(lattice.config_counts(e)) / win.area
        shift += [regularity.shift_average(e, pat, g) for pat in pats]
    shift /= 20
    direct /= 20
    gap = np.abs(shift - direct)
    return bool(gap.max() <= 0.02), {"M": M, "K": K, "seeds": 20, "max_gap": float(gap.max()),
                                     "worst_code": int(gap.argmax()),
                                     "shift": shift.round(4).tolist(),
                                     "direct": direct.round(4).tolist()}


CRITERIA = {
    1: ("stochasticity identity", c1_stochasticity, 1),
    2: ("free-exit normalization", c2_free_exit, 60),
    3: ("gauge reduction", c3_gauge_reduction, 1),
    4: ("Gibbs gauge invariance", c4_gibbs_gauge, 60),
    5: ("phase-region geometry", c5_phase, 1),
    6: ("sampler exactness", c6_sampler_exact, 60),
    7: ("mu(rho) slope", c7_mu_slope, 120),
    8: ("restriction inequality", c8_restriction_inequality, 600),
    9: ("restriction regularity", c9_restriction_regularity, 10),
    10: ("extension construction", c10_extension, 60),
    11: ("local statistics echo", c11_local_echo, 300),
    12: ("shift-average consistency", c12_shift_average, 120),
}


def run_criterion(number, ctx):
    name, fn, budget = CRITERIA[number]
    t0 = time.perf_counter()
    try:
        ok, detail = fn(ctx)
    except Exception as err:  # a crash is a failed criterion, not a crashed suite
        ok, detail = False, {"error": f"{type(err).__name__}: {err}"}
    return CriterionResult(number, name, bool(ok), time.perf_counter() - t0, budget, detail)


def run_suite(level="fast", only=None, hooks=None, threads=1, echo=None):
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    ctx = Context(level, dict(hooks or {}), threads)
    out = []
    for n in (only or sorted(CRITERIA)):
        res = run_criterion(n, ctx)
        if echo:
            echo(res.line())
        out.append(res)
    return out
