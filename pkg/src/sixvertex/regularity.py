"""Regularity of boundary data, slope estimates and shift-average statistics."""
import math
from dataclasses import dataclass

import numpy as np

from .errors import (IndexOutOfRange, InsufficientSamples, OutOfDomain,
                     PatternWindowOutOfDomain)
from .lattice import Ensemble, Rect, require_valid
from .weights import SlopePair


@dataclass(frozen=True)
class RegularityParams:
    """(R; eta)-regularity with slope rho.  R may be real; intervals of
    length up to floor(R) are checked against the bound eta * R."""
    R: float
    eta: float
    rho: float

    def __post_init__(self):
        if not self.R >= 1:
            raise ValueError(f"R must be at least 1, got {self.R}")
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if not 0 <= self.rho <= 1:
            raise ValueError(f"rho must lie in [0,1], got {self.rho}")


@dataclass(frozen=True)
class Interval:
    """Lattice interval: axis 'x' runs along a row y = fixed, 'y' along a column."""
    axis: str
    fixed: int
    lo: int
    hi: int

    def __len__(self):
        return self.hi - self.lo + 1

    def points(self):
        if self.axis == "x":
            return [(c, self.fixed) for c in range(self.lo, self.hi + 1)]
        return [(self.fixed, c) for c in range(self.lo, self.hi + 1)]

    def sub(self, lo, hi):
        return Interval(self.axis, self.fixed, lo, hi)


@dataclass(frozen=True)
class Witness:
    interval: Interval
    count: int
    expected: float
    side: str = None


def indicator(occupied, J):
    occ = set(map(tuple, occupied))
    return np.array([p in occ for p in J.points()], dtype=np.int64)


def _scan(ind, R, eta, rho):
    """First (length, start) with |count - rho*len| > eta*R, lengths <= R."""
    n = len(ind)
    S = np.concatenate([[0], np.cumsum(ind)])
    bound = eta * R * (1 + 1e-12) + 1e-12
    for ell in range(1, min(int(math.floor(R + 1e-9)), n) + 1):
        dev = np.abs(S[ell:] - S[:-ell] - rho * ell)
        bad = np.nonzero(dev > bound)[0]
        if bad.size:
            a = int(bad[0])
            return a, ell, int(S[a + ell] - S[a])
    return None


def is_regular_interval(occupied, J, p):
    """Returns (bool, Witness or None)."""
    ind = indicator(occupied, J)
    hit = _scan(ind, p.R, p.eta, p.rho)
    if hit is None:
        return True, None
    a, ell, cnt = hit
    return False, Witness(J.sub(J.lo + a, J.lo + a + ell - 1), cnt, p.rho * ell)


def boundary_sides(domain):
    d = domain
    return (
        ("S", Interval("x", d.y_min - 1, d.x_min, d.x_max)),
        ("N", Interval("x", d.y_max + 1, d.x_min, d.x_max)),
        ("W", Interval("y", d.x_min - 1, d.y_min, d.y_max)),
        ("E", Interval("y", d.x_max + 1, d.y_min, d.y_max)),
    )


def is_regular_rect(bd, domain, R, eta, st):
    """Slope s on the north and south sides, t on the west and east sides."""
    occupied = list(bd.entrance) + list(bd.exit or ())
    for side, J in boundary_sides(domain):
        rho = st.s if side in "SN" else st.t
        ok, wit = is_regular_interval(occupied, J, RegularityParams(R, eta, rho))
        if not ok:
            return False, Witness(wit.interval, wit.count, wit.expected, side)
    return True, None


def two_eta_bound_check(occupied, J, p):
    """Check ||I cap u| - rho|I|| < 2 eta |I| for every I in J with |I| >= R.

    Returns (holds, precondition_held, witness).  When the data is not
    (R; eta)-regular the bound is not implied, the check is vacuous and
    ``holds`` is True with ``precondition_held`` False.
    """
    ind = indicator(occupied, J)
    if _scan(ind, p.R, p.eta, p.rho) is not None:
        return True, False, None
    n = len(ind)
    S = np.concatenate([[0], np.cumsum(ind)])
    start = max(1, int(math.ceil(p.R - 1e-9)))
    for ell in range(start, n + 1):
        dev = np.abs(S[ell:] - S[:-ell] - p.rho * ell)
        bad = np.nonzero(dev >= 2 * p.eta * ell)[0]
        if bad.size:
            a = int(bad[0])
            return False, True, Witness(J.sub(J.lo + a, J.lo + a + ell - 1),
                                        int(S[a + ell] - S[a]), p.rho * ell)
    return True, True, None


def slope_estimate(e, window=None):
    """Mean vertical and horizontal edge occupation over a window.

    Each vertex contributes the average of its incoming and outgoing bit in
    each direction, i.e. every edge touching the window is counted with
    weight one half per endpoint inside it.  This keeps the vertical
    complement identity (s, t) -> (1 - s, t) exact on finite windows.
    """
    if window is None:
        window = e.domain
    if not e.domain.contains_rect(window):
        raise OutOfDomain(f"{window} not inside {e.domain}")
    sub = e.restrict(window).bits.astype(np.float64)
    s = float((sub[0] + sub[2]).mean() / 2)
    t = float((sub[1] + sub[3]).mean() / 2)
    return SlopePair(s, t)


# ------------------------------------------------------------------ grid of tiles

@dataclass(frozen=True)
class GridSpec:
    K: int
    M: int
    Y: int
    k: int = 0

    def __post_init__(self):
        if self.K < 1 or self.M < 1:
            raise ValueError("K and M must be positive")
        if not 0 <= self.Y <= self.M:
            raise ValueError(f"Y must lie in [0, M], got {self.Y}")
        if self.k < 0:
            raise ValueError("k must be nonnegative")

    @property
    def X(self):
        return -(-self.M // 2)

    @property
    def N(self):
        return self.K * self.M

    def _jr(self, i):
        if not 1 <= i <= self.K ** 2:
            raise IndexOutOfRange(f"tile index {i} outside [1, {self.K ** 2}]")
        return divmod(i - 1, self.K)

    def omega(self, i):
        j, r = self._jr(i)
        M = self.M
        return Rect(r * M + 1, r * M + M, j * M + 1, j * M + M)

    def z(self, i):
        j, r = self._jr(i)
        return (r * self.M + self.X, j * self.M + self.Y)


def _check_square(e, g):
    d = e.domain
    if d.width != g.N or d.height != g.N:
        raise OutOfDomain(f"ensemble on {d} is not {g.N} x {g.N}")
    return d.x_min - 1, d.y_min - 1


def make_pattern(codes):
    """Pattern on [-k, k]^2 from a (2k+1)^2 grid of codes, bottom row first."""
    codes = np.asarray(codes)
    n = codes.shape[0]
    if codes.shape != (n, n) or n % 2 == 0:
        raise ValueError("pattern must be a square grid of odd side")
    k = n // 2
    pat = Ensemble.from_codes(Rect(-k, k, -k, k), codes)
    require_valid(pat)
    return pat


def single_vertex_pattern(code):
    return make_pattern([[code]])


def _pattern_k(pattern):
    d = pattern.domain
    k = d.x_max
    if d != Rect(-k, k, -k, k):
        raise ValueError(f"pattern must live on [-k, k]^2, got {d}")
    return k


def psi_values(e, pattern, g):
    """psi_i for i = 1..K^2 as a 0/1 array."""
    ox, oy = _check_square(e, g)
    k = _pattern_k(pattern)
    require_valid(pattern)
    for i in range(1, g.K ** 2 + 1):
        x, y = g.z(i)
        if min(x, g.N + 1 - x, y, g.N + 1 - y) <= k:
            raise PatternWindowOutOfDomain(f"window of radius {k} at z_{i} = ({x}, {y}) "
                                           f"leaves [1, {g.N}]^2")
    bits = e.bits
    pb = pattern.bits
    out = np.zeros(g.K ** 2, dtype=np.int8)
    for i in range(1, g.K ** 2 + 1):
        x, y = g.z(i)
        r, c = y - 1 - k, x - 1 - k
        out[i - 1] = np.array_equal(bits[:, r:r + 2 * k + 1, c:c + 2 * k + 1], pb)
    return out


def shift_average(e, pattern, g):
    return float(psi_values(e, pattern, g).mean())


def theta_event(e, i, g, eta, s):
    """Is the entrance data on the south side of tile i (eta M; eta)-regular?"""
    ox, oy = _check_square(e, g)
    tile = g.omega(i)
    row = tile.y_min - 1
    ind = e.i1[row, tile.x_min - 1:tile.x_max].astype(np.int64)
    R = max(eta * g.M, 1.0)
    return _scan(ind, R, eta, s) is None


def local_pattern_probability(samples, pattern, at):
    """Frequency of ``pattern`` centred at vertex ``at`` over a sample stream.

    Returns (estimate, stderr) with the binomial standard error.
    """
    k = _pattern_k(pattern)
    x, y = at
    window = Rect(x - k, x + k, y - k, y + k)
    hits = n = 0
    for e in samples:
        if not e.domain.contains_rect(window):
            raise PatternWindowOutOfDomain(f"{window} not inside {e.domain}")
        d = e.domain
        r, c = window.y_min - d.y_min, window.x_min - d.x_min
        hits += np.array_equal(e.bits[:, r:r + 2 * k + 1, c:c + 2 * k + 1], pattern.bits)
        n += 1
    if n < 2:
        raise InsufficientSamples(f"need at least 2 samples, got {n}")
    p = hits / n
    return p, math.sqrt(p * (1 - p) / n)
