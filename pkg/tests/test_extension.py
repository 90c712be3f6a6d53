import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import entrance_sites
from sixvertex import lattice as lt
from sixvertex import sampler as sm
from sixvertex.errors import (BalanceViolation, CorridorOverflow, MonotoneViolation,
                              NegativeFlow)
from sixvertex.extension import (ExtensionProblem, extend, extend_with_diagnostics,
                                 fill_monotone, plan_frame)
from sixvertex.lattice import BoundaryData, Ensemble, Rect
from sixvertex.verify import extension_fixture, monotone_oracle_sweep, periodic_boundary
from sixvertex.weights import SlopePair, StochasticParams


def exit_sites(d):
    return [(x, d.y_max + 1) for x in range(d.x_min, d.x_max + 1)] + \
           [(d.x_max + 1, y) for y in range(d.y_min, d.y_max + 1)]


def test_straight_path():
    g = Rect(1, 5, 1, 2)
    e = fill_monotone(g, BoundaryData.build(g, [(0, 1)], [(6, 1)]))
    assert (e.codes[0] == lt.B2).all() and (e.codes[1] == lt.A1).all()


def test_lowest_path_turns_late():
    g = Rect(1, 3, 1, 3)
    e = fill_monotone(g, BoundaryData.build(g, [(0, 1)], [(3, 4)]))
    assert lt.to_paths(e).paths == (((0, 1), (1, 1), (2, 1), (3, 1), (3, 2), (3, 3), (3, 4)),)


def test_monotone_violation_names_index():
    g = Rect(1, 3, 1, 3)
    with pytest.raises(MonotoneViolation) as info:
        fill_monotone(g, BoundaryData.build(g, [(3, 0)], [(1, 4)]))
    assert info.value.index == 0


def test_oracle_equivalence_small_rectangles():
    cases, mismatches = monotone_oracle_sweep(max_side=4, max_paths=3)
    assert cases > 10_000 and mismatches == 0


@settings(max_examples=60)
@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2**32), st.floats(0.05, 0.95),
       st.floats(0.05, 0.95), st.data())
def test_fill_is_canonical_on_its_outputs(W, H, seed, B1, B2, data):
    g = Rect(1, W, 1, H)
    ent = [s for s in entrance_sites(g) if data.draw(st.booleans())]
    e = sm.sample(sm.SamplerSpec(StochasticParams(B1, B2), g, ent, seed))
    f = fill_monotone(g, lt.boundary_of(e))
    assert lt.validate(f) == [] and lt.boundary_of(f) == lt.boundary_of(e)
    assert fill_monotone(g, lt.boundary_of(f)) == f


def test_frame_geometry_and_corridors():
    p = extension_fixture(20, 10)
    plan = plan_frame(p)
    pts = [set(gm.vertices()) for gm in plan.gamma]
    frame = set(p.outer.vertices()) - set(p.inner_domain.vertices())
    assert sum(map(len, pts)) == len(frame) and set().union(*pts) == frame
    K = (plan.K1, plan.K2, plan.K3, plan.K4)
    sizes = {k: len(v) for k, v in plan.corridor_sets.items()}
    assert sizes == {(1, 1): K[0], (1, 2): K[1], (2, 1): K[1], (2, 2): K[2],
                     (3, 1): K[2], (3, 2): K[3], (4, 1): K[3], (4, 2): K[0]}


def test_flow_estimate_window():
    p = extension_fixture(40, 20)
    plan = plan_frame(p)
    s, t = p.st.s, p.st.t
    for k in (plan.K1, plan.K3):
        assert s * p.W - 40 * p.eta * p.N <= k <= s * p.W + 40 * p.eta * p.N
    for k in (plan.K2, plan.K4):
        assert t * p.W - 40 * p.eta * p.N <= k <= t * p.W + 40 * p.eta * p.N


@pytest.mark.parametrize("N,W", [(20, 10), (64, 32)])
def test_extend_fixture(N, W):
    p = extension_fixture(N, W)
    out, diag = extend_with_diagnostics(p)
    assert lt.validate(out) == []
    assert lt.boundary_of(out) == p.outer_bd
    assert out.restrict(p.inner_domain) == p.inner
    assert diag["K1"] == W // 2 and not diag["nwr_satisfied"]
    assert set(diag["stage_timings"]) == {"plan", "gamma1", "gamma2", "gamma3", "gamma4", "assemble"}


def test_empty_everything():
    N, W = 4, 3
    o = Rect(1, N + 2 * W, 1, N + 2 * W)
    p = ExtensionProblem(N, W, BoundaryData.build(o, [], []), Ensemble.empty(Rect(4, 7, 4, 7)),
                         R=1, eta=0.1, st=SlopePair(0.0, 0.0))
    assert extend(p) == Ensemble.empty(o)


def test_balance_violation():
    p = extension_fixture(20, 10)
    bd = p.outer_bd
    broken = BoundaryData.build(bd.domain, bd.entrance, bd.exit[:-1])
    with pytest.raises(BalanceViolation, match="north strip"):
        plan_frame(ExtensionProblem(p.N, p.W, broken, p.inner, p.R, p.eta, p.st))


def test_negative_flow():
    N, W = 4, 3
    o = Rect(1, N + 2 * W, 1, N + 2 * W)
    inner = sm.sample(sm.SamplerSpec(StochasticParams(0.5, 0.5), Rect(4, 7, 4, 7), [(4, 3)], 0))
    p = ExtensionProblem(N, W, BoundaryData.build(o, [(4, 0)], [(11, 10)]), inner,
                         R=1, eta=0.1, st=SlopePair(0.0, 0.0))
    with pytest.raises(NegativeFlow):
        plan_frame(p)


def _random_problem(rnd):
    N, W = rnd.randint(2, 10), rnd.randint(2, 8)
    o = Rect(1, N + 2 * W, 1, N + 2 * W)
    k = rnd.randint(0, 2 * o.width)
    ent = rnd.sample(entrance_sites(o), k)
    ex = rnd.sample(exit_sites(o), k)
    inner_dom = Rect(W + 1, N + W, W + 1, N + W)
    inner_ent = [s for s in entrance_sites(inner_dom) if rnd.random() < 0.5]
    inner = sm.sample(sm.SamplerSpec(StochasticParams(0.3, 0.6), inner_dom, inner_ent,
                                     rnd.getrandbits(32)))
    st_ = SlopePair(rnd.random(), rnd.random())
    return ExtensionProblem(N, W, BoundaryData.build(o, ent, ex), inner, R=1, eta=0.1, st=st_)


def test_random_well_formed_fixtures_balance():
    rnd = random.Random(1000)
    outcomes = {"ok": 0, "flow": 0, "route": 0}
    for _ in range(1000):
        p = _random_problem(rnd)
        try:
            plan_frame(p)
        except (NegativeFlow, CorridorOverflow):
            outcomes["flow"] += 1
            continue
        outcomes["ok"] += 1
        try:
            out = extend(p)
        except MonotoneViolation:
            outcomes["route"] += 1
            continue
        # whenever an extension is produced it is a genuine one
        assert lt.validate(out) == []
        assert lt.boundary_of(out) == p.outer_bd
        assert out.restrict(p.inner_domain) == p.inner
    assert outcomes["ok"] > 0
