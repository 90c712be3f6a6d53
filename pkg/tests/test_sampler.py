from collections import Counter
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import entrance_sites
from sixvertex import exact as ex
from sixvertex import lattice as lt
from sixvertex import rng
from sixvertex import sampler as sm
from sixvertex.errors import BadRestrictionParams, SpecMismatch
from sixvertex.lattice import BoundaryData, Ensemble, Rect
from sixvertex.restriction import RestrictionParams, index_sets, restrict_ensemble
from sixvertex.weights import StochasticParams, WeightSystem, phi

P = StochasticParams(0.2, 0.8)


def test_stochastic_rows_sum_to_one():
    B1, B2 = Fraction(2, 7), Fraction(5, 9)
    w = WeightSystem.stochastic(B1, B2)
    table = dict(zip(lt.CONFIGS, w.as_tuple()))
    for i1 in (0, 1):
        for j1 in (0, 1):
            out = sum(v for (a, b, c, d), v in table.items() if (a, b) == (i1, j1))
            assert out == 1


def test_staircase_when_B_zero():
    d = Rect(1, 6, 1, 6)
    p = StochasticParams(0, 0, allow_degenerate=True)
    e = sm.sample(sm.SamplerSpec(p, d, [(3, 0), (0, 2)], seed=4))
    codes = e.codes
    # every vertex with exactly one incoming arrow turns
    assert not np.isin(codes, (lt.B1, lt.B2)).any()
    assert (codes != lt.A1).any()


def test_straight_rays_when_B_one():
    d = Rect(1, 5, 1, 4)
    p = StochasticParams(1, 1, allow_degenerate=True)
    e = sm.sample(sm.SamplerSpec(p, d, [(2, 0), (0, 3)], seed=1))
    bd = lt.boundary_of(e)
    assert set(bd.exit) == {(2, 5), (6, 3)}
    assert not np.isin(e.codes, (lt.C1, lt.C2)).any()


def test_reproducible():
    spec = sm.SamplerSpec(P, Rect(1, 40, 1, 30), sm.DoubleSidedBernoulli(0.4, 0.6), seed=77)
    a, b = sm.sample(spec), sm.sample(spec)
    assert a == b and a.bits.tobytes() == b.bits.tobytes()
    assert sm.sample(replace(spec, seed=78)) != a


def test_sample_many_matches_single_runs():
    spec = sm.SamplerSpec(P, Rect(1, 8, 1, 8), sm.DoubleSidedBernoulli(0.3, 0.5), seed=5)
    many = list(sm.sample_many(spec, 7, chunk=3))
    threaded = list(sm.sample_many(spec, 7, chunk=2, threads=3))
    for r, e in enumerate(many):
        assert e == sm.sample(replace(spec, seed=rng.derive_seed(5, r)))
    assert many == threaded


def test_explicit_entrance_must_be_on_boundary():
    with pytest.raises(ValueError):
        sm.SamplerSpec(P, Rect(1, 3, 1, 3), [(2, 2)])
    with pytest.raises(ValueError):
        sm.DoubleSidedBernoulli(1.5, 0.5)


@settings(max_examples=30)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**32), st.floats(0, 1), st.floats(0, 1))
def test_outputs_validate_and_keep_entrances(W, H, seed, r1, r2):
    d = Rect(1, W, 1, H)
    e = sm.sample(sm.SamplerSpec(P, d, sm.DoubleSidedBernoulli(r1, r2), seed))
    assert lt.validate(e) == []
    expl = lt.boundary_of(e).entrance
    assert sm.sample(sm.SamplerSpec(P, d, list(expl), seed)) == e


def test_mu_window_saturated_cases():
    win = Rect(1, 20, 1, 20)
    assert sm.sample_mu_window(P, 0.0, win, 3) == Ensemble.empty(win)
    full = sm.sample_mu_window(P, 1.0, win, 3)
    assert (full.codes == lt.A2).all()


def test_mu_window_densities():
    # single windows are noisy (paths correlate whole columns), so pool seeds
    win = Rect(1, 256, 1, 256)
    es = [sm.sample_mu_window(P, 0.5, win, s) for s in range(40)]
    assert np.mean([e.i1.mean() for e in es]) == pytest.approx(0.5, abs=0.01)
    assert np.mean([e.j1.mean() for e in es]) == pytest.approx(phi(P, 0.5), abs=0.01)


def test_mu_window_margin_has_same_law():
    win = Rect(1, 6, 1, 6)
    n = 20_000
    freq = {}
    for m in (0, 4):
        bits = sm.sample_bits(sm.mu_spec(P, 0.5, win, 0, margin=m), range(n))[:, :, m:, m:]
        # law of the configuration at the window's corner vertex
        packed = bits[:, 0, 0, 0] * 8 + bits[:, 1, 0, 0] * 4 + bits[:, 2, 0, 0] * 2 + bits[:, 3, 0, 0]
        freq[m] = np.bincount(packed, minlength=16) / n
    assert np.abs(freq[0] - freq[4]).max() < 0.02


def test_mu_spec_requires_ordered_params():
    with pytest.raises(ValueError):
        sm.mu_spec(StochasticParams(0.8, 0.2), 0.5, Rect(1, 2, 1, 2), 0)


def test_exit_law_matches_exact():
    """3x3 with fixed entrance: empirical exit data within TV 0.01 of exact."""
    d = Rect(1, 3, 1, 3)
    ent = [(1, 0), (3, 0), (0, 2)]
    exact = Counter()
    for e, pr in ex.stochastic_law(d, P, ent).items():
        exact[lt.boundary_of(e).exit] += pr
    spec = sm.SamplerSpec(P, d, ent, seed=99)
    n = 100_000
    emp = Counter()
    for e in sm.sample_many(spec, n, chunk=20_000):
        emp[lt.boundary_of(e).exit] += 1
    keys = set(exact) | set(emp)
    tv = 0.5 * sum(abs(exact[k] - emp[k] / n) for k in keys)
    assert tv < 0.01


def test_grand_coupling_identical():
    spec = sm.SamplerSpec(P, Rect(1, 10, 1, 10), sm.DoubleSidedBernoulli(0.5, 0.5), seed=8)
    pair = sm.couple_grand(spec, spec)
    assert pair.agreement_mask.all()


def test_grand_coupling_marginals_and_mask():
    d = Rect(1, 12, 1, 12)
    a = sm.SamplerSpec(P, d, [(1, 0), (5, 0), (0, 3)], seed=21)
    b = sm.SamplerSpec(P, d, [(2, 0), (5, 0), (0, 3)], seed=21)
    pair = sm.couple_grand(a, b)
    assert pair.primary_ensemble == sm.sample(a)
    assert pair.secondary_ensemble == sm.sample(b)
    same = (pair.primary_ensemble.bits == pair.secondary_ensemble.bits).all(axis=0)
    assert (pair.agreement_mask == same).all()
    assert not pair.agreement_mask.all()


def test_grand_coupling_mismatch():
    d = Rect(1, 4, 1, 4)
    a = sm.SamplerSpec(P, d, [], seed=1)
    with pytest.raises(SpecMismatch):
        sm.couple_grand(a, replace(a, seed=2))
    with pytest.raises(SpecMismatch):
        sm.couple_grand(a, sm.SamplerSpec(P, Rect(1, 5, 1, 4), [], seed=1))


def _many_paths(d):
    return [s for k, s in enumerate(entrance_sites(d)) if k % 2 == 0]


def test_restriction_coupling_L_equals_K():
    d = Rect(1, 10, 1, 10)
    pair, diag = sm.couple_restriction(_many_paths(d), 3, 3, P, d, seed=4)
    assert pair.agreement_mask.all()
    assert diag.secondary_equals_restriction


def test_restriction_coupling_L_zero():
    d = Rect(1, 10, 1, 10)
    pair, diag = sm.couple_restriction(_many_paths(d), 0, 2, P, d, seed=4)
    assert pair.secondary_ensemble == Ensemble.empty(d)


def test_restriction_coupling_bad_params():
    d = Rect(1, 4, 1, 4)
    with pytest.raises(BadRestrictionParams):
        sm.couple_restriction([], 3, 2, P, d, seed=0)


def test_index_sets_example():
    assert index_sets(3, 4, RestrictionParams(2, 3)) == ([-2, -1, 1, 2, 4], [-1, 2], [-2, 1, 4])


@settings(max_examples=40)
@given(st.integers(2, 10), st.integers(2, 10), st.integers(0, 10**6), st.data())
def test_restriction_coupling_upsilon_consistency(W, H, seed, data):
    d = Rect(1, W, 1, H)
    ent = [s for s in entrance_sites(d) if data.draw(st.booleans())]
    K = data.draw(st.integers(1, 4))
    L = data.draw(st.integers(0, K))
    pair, diag = sm.couple_restriction(ent, L, K, P, d, seed)
    assert lt.validate(pair.secondary_ensemble) == []
    # the secondary is always driven by the restricted entrances
    assert lt.boundary_of(pair.secondary_ensemble).entrance == \
        lt.boundary_of(diag.restricted).entrance
    if diag.upsilon_held:
        assert pair.secondary_ensemble == restrict_ensemble(pair.primary_ensemble, RestrictionParams(L, K))
