"""(L; K)-restriction: keep paths whose index is mK + r with r in [1, L].

Python's % is floored, so ``(i - 1) % K`` lands in [0, K) for negative i as
well and m ranges over all integers as it should.
"""
from dataclasses import dataclass

from .errors import BadRestrictionParams, PreconditionViolated
from .lattice import BoundaryData, PathEnsemble, from_paths, to_paths
from .regularity import is_regular_rect
from .weights import SlopePair


@dataclass(frozen=True)
class RestrictionParams:
    L: int
    K: int

    def __post_init__(self):
        if not (self.K >= 1 and 0 <= self.L <= self.K):
            raise BadRestrictionParams(f"need K >= 1 and 0 <= L <= K, got L={self.L}, K={self.K}")

    def keeps(self, i):
        return (i - 1) % self.K < self.L


def kept_indices(B, A, p):
    return [i for i in range(-B, A + 1) if p.keeps(i)]


def index_sets(B, A, p):
    """(I, R, S): kept indices, kept r with r+1 removed, kept s with s-1 removed.

    Only neighbours that exist in [-B, A] count as removed.
    """
    lo, hi = -B, A
    kept = kept_indices(B, A, p)
    r_set = [r for r in kept if r + 1 <= hi and not p.keeps(r + 1)]
    s_set = [s for s in kept if s - 1 >= lo and not p.keeps(s - 1)]
    return kept, r_set, s_set


def restrict_boundary(bd, p):
    keep = [p.keeps(i) for i in bd.indices()]
    ent = [u for u, k in zip(bd.entrance, keep) if k]
    ex = None
    if bd.exit is not None:
        ex = [v for v, k in zip(bd.exit, keep) if k]
    return BoundaryData.build(bd.domain, ent, ex)


def restrict_paths(pe, p):
    kept = [path for i, path in zip(pe.indices(), pe.paths) if p.keeps(i)]
    south = sum(1 for path in kept if path[1][0] == path[0][0])
    return PathEnsemble(tuple(kept), south - 1)


def restrict_ensemble(e, p):
    return from_paths(restrict_paths(to_paths(e), p), e.domain)


@dataclass
class RestrictionRegularityReport:
    ok: bool
    R_out: float
    eta_out: float
    slope: SlopePair
    input_regular: bool
    witness: object = None


def check_restriction_regularity(bd, p, s0, t0, eta, omega, R, s=None, t=None):
    """Scan the restricted data for (2K/(s0 t0 omega); 4(eta+omega)/(s0 t0))-regularity.

    (s, t) default to (s0 L/K, t0 L/K).  The input must itself be
    (R; eta)-regular with slope (s0, t0); that and the parameter inequalities
    are the preconditions, reported through PreconditionViolated.
    """
    L, K = p.L, p.K
    if s is None:
        s = s0 * L / K
    if t is None:
        t = t0 * L / K
    if not L > 0:
        raise PreconditionViolated(f"L must be positive, got {L}")
    if not abs(s0 * L / K - s) < eta:
        raise PreconditionViolated(f"|s0 L/K - s| = {abs(s0 * L / K - s):.4g} >= eta = {eta}")
    if not abs(t0 * L / K - t) < eta:
        raise PreconditionViolated(f"|t0 L/K - t| = {abs(t0 * L / K - t):.4g} >= eta = {eta}")
    if not R <= L:
        raise PreconditionViolated(f"R = {R} > L = {L}")
    if not eta < s0 * t0 / 4:
        raise PreconditionViolated(f"eta = {eta} >= s0 t0 / 4 = {s0 * t0 / 4}")
    if omega <= 0:
        raise PreconditionViolated(f"omega must be positive, got {omega}")
    ok_in, wit_in = is_regular_rect(bd, bd.domain, R, eta, SlopePair(s0, t0))
    if not ok_in:
        raise PreconditionViolated(f"input data is not ({R}; {eta})-regular with slope "
                                   f"({s0}, {t0}): {wit_in}")
    R_out = 2 * K / (s0 * t0 * omega)
    eta_out = 4 * (eta + omega) / (s0 * t0)
    restricted = restrict_boundary(bd, p)
    ok, wit = is_regular_rect(restricted, bd.domain, R_out, eta_out, SlopePair(s, t))
    return RestrictionRegularityReport(ok, R_out, eta_out, SlopePair(s, t), True, wit)

