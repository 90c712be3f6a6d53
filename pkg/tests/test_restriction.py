import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import ensembles
from sixvertex import lattice as lt
from sixvertex.errors import BadRestrictionParams, PreconditionViolated
from sixvertex.lattice import BoundaryData, Ensemble, Rect
from sixvertex.regularity import is_regular_rect
from sixvertex.restriction import (RestrictionParams, check_restriction_regularity,
                                   index_sets, kept_indices, restrict_boundary,
                                   restrict_ensemble, restrict_paths)
from sixvertex.weights import SlopePair

params = st.integers(1, 6).flatmap(lambda K: st.tuples(st.integers(0, K), st.just(K)))


def test_params_validation():
    for L, K in [(1, 0), (-1, 2), (3, 2)]:
        with pytest.raises(BadRestrictionParams):
            RestrictionParams(L, K)


def test_negative_indices_use_floored_remainder():
    p = RestrictionParams(2, 3)
    # kept residues are 1, 2 mod 3, on both sides of zero
    assert kept_indices(6, 6, p) == [-5, -4, -2, -1, 1, 2, 4, 5]


def test_index_sets_from_text_example():
    assert index_sets(3, 4, RestrictionParams(2, 3)) == ([-2, -1, 1, 2, 4], [-1, 2], [-2, 1, 4])


def test_full_and_empty_restriction():
    d = Rect(1, 4, 1, 4)
    bd = BoundaryData.build(d, [(1, 0), (3, 0), (0, 2)], [(5, 1), (2, 5), (4, 5)])
    assert restrict_boundary(bd, RestrictionParams(3, 3)) == bd
    empty = restrict_boundary(bd, RestrictionParams(0, 3))
    assert empty.entrance == () and empty.exit == ()
    assert restrict_ensemble(Ensemble.empty(d), RestrictionParams(1, 2)) == Ensemble.empty(d)


@given(st.integers(-1, 40), st.integers(0, 40), params)
def test_kept_count_arithmetic(B, A, LK):
    L, K = LK
    p = RestrictionParams(L, K)
    direct = sum(1 for i in range(-B, A + 1) if 1 <= i - K * ((i - 1) // K) <= L)
    blocks = 0
    for m in range(-B // K - 2, A // K + 2):
        lo, hi = max(m * K + 1, -B), min(m * K + L, A)
        blocks += max(0, hi - lo + 1)
    assert len(kept_indices(B, A, p)) == direct == blocks


@given(st.integers(-1, 30), st.integers(0, 30), params)
def test_index_sets_neighbours(B, A, LK):
    p = RestrictionParams(*LK)
    kept, R, S = index_sets(B, A, p)
    assert set(R) <= set(kept) and set(S) <= set(kept)
    for r in R:
        assert r + 1 <= A and not p.keeps(r + 1)
    for s in S:
        assert s - 1 >= -B and not p.keeps(s - 1)


@settings(max_examples=60)
@given(ensembles(max_side=10), params)
def test_commutes_with_boundary(e, LK):
    p = RestrictionParams(*LK)
    r = restrict_ensemble(e, p)
    assert lt.validate(r) == []
    assert lt.boundary_of(r) == restrict_boundary(lt.boundary_of(e), p)


@settings(max_examples=60)
@given(ensembles(max_side=10), params)
def test_restricted_edges_are_subset(e, LK):
    r = restrict_ensemble(e, RestrictionParams(*LK))
    assert (r.bits <= e.bits).all()
    kept = restrict_paths(lt.to_paths(e), RestrictionParams(*LK)).paths
    assert set(kept) <= set(lt.to_paths(e).paths)


@settings(max_examples=60)
@given(ensembles(max_side=10), params, params)
def test_composition(e, p1, p2):
    bd = lt.boundary_of(e)
    once = restrict_boundary(bd, RestrictionParams(*p1))
    twice = restrict_boundary(once, RestrictionParams(*p2))
    assert twice.n_paths <= once.n_paths <= bd.n_paths
    assert set(twice.entrance) <= set(once.entrance)
    K = p1[1]
    assert restrict_boundary(bd, RestrictionParams(K, K)) == bd


def _periodic(d, period, phase=1):
    """Every period-th site on each side, entrances and exits."""
    S = [(x, d.y_min - 1) for x in range(d.x_min, d.x_max + 1) if (x - phase) % period == 0]
    W = [(d.x_min - 1, y) for y in range(d.y_min, d.y_max + 1) if (y - phase) % period == 0]
    N = [(x, d.y_max + 1) for x, _ in S]
    E = [(d.x_max + 1, y) for _, y in W]
    return BoundaryData.build(d, S + W, N + E)


def test_identity_restriction_keeps_regularity():
    d = Rect(1, 120, 1, 120)
    bd = _periodic(d, 2)
    rep = check_restriction_regularity(bd, RestrictionParams(10, 10), 0.5, 0.5, 0.05, 0.1, 10)
    assert rep.ok and rep.slope == SlopePair(0.5, 0.5)


def test_preconditions():
    d = Rect(1, 60, 1, 60)
    bd = _periodic(d, 2)
    p = RestrictionParams(10, 20)
    with pytest.raises(PreconditionViolated, match="s0 t0 / 4"):
        check_restriction_regularity(bd, p, 0.5, 0.5, 0.07, 0.1, 10)
    with pytest.raises(PreconditionViolated, match="R = 12 > L"):
        check_restriction_regularity(bd, p, 0.5, 0.5, 0.05, 0.1, 12)
    with pytest.raises(PreconditionViolated, match="L must be positive"):
        check_restriction_regularity(bd, RestrictionParams(0, 20), 0.5, 0.5, 0.05, 0.1, 10)
    with pytest.raises(PreconditionViolated, match="not"):
        check_restriction_regularity(_periodic(d, 3), p, 0.5, 0.5, 0.05, 0.1, 10)
    with pytest.raises(PreconditionViolated, match="s0 L/K"):
        check_restriction_regularity(bd, p, 0.5, 0.5, 0.05, 0.1, 10, s=0.4)


@st.composite
def holey_full_data(draw, n, gap):
    """Full occupancy on every side of [1, n]^2 minus holes at least ``gap`` apart.

    The same number of holes on each side keeps entrance and exit counts equal.
    """
    k = draw(st.integers(0, n // gap - 1))
    sides = []
    for _ in range(4):
        offs = sorted(draw(st.lists(st.integers(0, n - 1 - gap * (k - 1) if k else n - 1),
                                    min_size=k, max_size=k)))
        sides.append({1 + o + gap * j for j, o in enumerate(offs)})
    hs, hw, hn, he = sides
    S = [(x, 0) for x in range(1, n + 1) if x not in hs]
    W = [(0, y) for y in range(1, n + 1) if y not in hw]
    N = [(x, n + 1) for x in range(1, n + 1) if x not in hn]
    E = [(n + 1, y) for y in range(1, n + 1) if y not in he]
    return BoundaryData.build(Rect(1, n, 1, n), S + W, N + E)


@settings(max_examples=15)
@given(holey_full_data(1800, 20))
def test_restriction_regularity_with_binding_bound(bd):
    """Near-full data: here eta_out = 0.4 < 1/2, so the output scan can fail."""
    p = RestrictionParams(20, 40)
    s0 = t0 = 1.0
    eta, omega, R = 0.05, 0.05, 20
    assert is_regular_rect(bd, bd.domain, R, eta, SlopePair(s0, t0))[0]
    rep = check_restriction_regularity(bd, p, s0, t0, eta, omega, R)
    assert rep.eta_out == pytest.approx(0.4) and rep.R_out == pytest.approx(1600)
    assert rep.ok, rep.witness


def test_binding_scan_can_fail():
    # the same scan rejects data whose kept fraction is far from L/K
    d = Rect(1, 1800, 1, 1800)
    bd = _periodic(d, 1)
    ok, _ = is_regular_rect(restrict_boundary(bd, RestrictionParams(20, 40)), d,
                            1600, 0.4, SlopePair(0.9, 0.9))
    assert not ok
