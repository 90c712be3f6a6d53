"""Extending an inner ensemble on [W+1, N+W]^2 to boundary data on [1, N+2W]^2.

The frame around the inner square is cut into four strips

    G1 = [1, W] x [1, N+W]            (west, with the south-west block)
    G2 = [W+1, N+2W] x [1, W]         (south, with the south-east block)
    G3 = [N+W+1, N+2W] x [W+1, N+2W]  (east, with the north-east block)
    G4 = [1, N+W] x [N+W+1, N+2W]     (north, with the north-west block)

and K_i paths are routed from G_{i-1} into G_i (G0 = G4) through the
south-/west-most edges of their common side: K1 from G1 up into G4, K2 from G1
into G2, K3 from G2 up into G3, K4 from G4 into G3.  Each strip then has
complete boundary data and is filled with the canonical lowest non-crossing
family.
"""
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (BalanceViolation, CorridorOverflow, InconsistentBoundary,
                     MonotoneViolation, NegativeFlow)
from .lattice import BoundaryData, Ensemble, PathEnsemble, Rect, boundary_of, from_paths

_NEG, _POS = -(1 << 40), 1 << 40


class RoutingFailure(RuntimeError):
    """The greedy fill got stuck although the monotone criterion held."""


def fill_monotone(gamma, bd):
    """Lowest non-crossing path family on ``gamma`` with boundary data ``bd``.

    Paths are routed in increasing index.  Path i stays strictly above path
    i-1 on every vertical line both cross and strictly left of it on every
    horizontal line both cross (so no edge is shared), and among such paths
    it is the one that turns east whenever it still can.
    """
    if bd.exit is None or len(bd.exit) != len(bd.entrance):
        raise InconsistentBoundary("fill_monotone needs full boundary data with matching counts")
    x0, x1, y0, y1 = gamma.x_min, gamma.x_max, gamma.y_min, gamma.y_max
    W, H = gamma.width, gamma.height
    for i, u, v in zip(bd.indices(), bd.entrance, bd.exit):
        if gamma.side_of(u) not in ("S", "W") or gamma.side_of(v) not in ("N", "E"):
            raise InconsistentBoundary(f"path {i}: {u} -> {v} not on the right sides of {gamma}")
        if not (u[0] <= v[0] and u[1] <= v[1]):
            raise MonotoneViolation(f"u_{i} = {u} is not below v_{i} = {v}", index=i)

    # barrier of the previous path: hrow[c - x0 + 1] is the row where it
    # crosses from column c to c+1, vcol[r - y0 + 1] the column where it
    # crosses from row r to r+1
    hrow = np.full(W + 1, _NEG, dtype=np.int64)
    vcol = np.full(H + 1, _POS, dtype=np.int64)
    paths = []
    for i, u, v in zip(bd.indices(), bd.entrance, bd.exit):
        if gamma.side_of(u) == "S":
            a = (u[0], y0)
            first_ok = u[0] < vcol[0]
        else:
            a = (x0, u[1])
            first_ok = u[1] > hrow[0]
        if gamma.side_of(v) == "N":
            b = (v[0], y1)
            last_ok = v[0] < vcol[H]
        else:
            b = (x1, v[1])
            last_ok = v[1] > hrow[W]
        xb, yb = b
        if not (first_ok and last_ok and a[0] <= xb and a[1] <= yb):
            raise MonotoneViolation(f"no room for path {i} from {u} to {v}", index=i)
        # north-then-east feasibility from (x, y): x < min vcol over rows
        # y..yb-1 and yb > max hrow over columns x..xb-1
        vmin = np.full(H + 2, _POS, dtype=np.int64)
        for r in range(yb - 1, y0 - 1, -1):
            k = r - y0 + 1
            vmin[k] = min(vmin[k + 1], vcol[k])
        hmax = np.full(W + 2, _NEG, dtype=np.int64)
        for c in range(xb - 1, x0 - 1, -1):
            k = c - x0 + 1
            hmax[k] = max(hmax[k + 1], hrow[k])

        def feasible(x, y):
            return x < vmin[y - y0 + 1] and yb > hmax[x - x0 + 1]

        if not feasible(*a):
            raise MonotoneViolation(f"no room for path {i} from {u} to {v}", index=i)
        x, y = a
        pts = [u, a]
        while (x, y) != b:
            if x < xb and y > hrow[x - x0 + 1] and feasible(x + 1, y):
                x += 1
            elif y < yb and x < vcol[y - y0 + 1] and feasible(x, y + 1):
                y += 1
            else:
                raise RoutingFailure(f"path {i} stuck at {(x, y)}")
            pts.append((x, y))
        pts.append(v)
        paths.append(tuple(pts))
        hrow[:] = _NEG
        vcol[:] = _POS
        for p, q in zip(pts[:-1], pts[1:]):
            if q[1] == p[1]:
                hrow[p[0] - x0 + 1] = p[1]
            else:
                vcol[p[1] - y0 + 1] = p[0]
    return from_paths(PathEnsemble(tuple(paths), bd.B), gamma)


@dataclass(frozen=True)
class ExtensionProblem:
    N: int
    W: int
    outer_bd: BoundaryData
    inner: Ensemble
    R: int
    eta: float
    st: object

    @property
    def outer(self):
        return Rect(1, self.N + 2 * self.W, 1, self.N + 2 * self.W)

    @property
    def inner_domain(self):
        return Rect(self.W + 1, self.N + self.W, self.W + 1, self.N + self.W)

    def __post_init__(self):
        if self.N < 1 or self.W < 1:
            raise ValueError("N and W must be positive")
        if self.outer_bd.domain != self.outer:
            raise ValueError(f"outer data lives on {self.outer_bd.domain}, expected {self.outer}")
        if self.inner.domain != self.inner_domain:
            raise ValueError(f"inner ensemble lives on {self.inner.domain}, "
                             f"expected {self.inner_domain}")
        if self.outer_bd.exit is None:
            raise ValueError("outer boundary data needs exit vertices")


@dataclass
class FramePlan:
    gamma: tuple
    K1: int
    K2: int
    K3: int
    K4: int
    corridor_sets: dict
    counts: dict
    boundaries: tuple = field(default=None, repr=False)


def _gammas(N, W):
    return (Rect(1, W, 1, N + W), Rect(W + 1, N + 2 * W, 1, W),
            Rect(N + W + 1, N + 2 * W, W + 1, N + 2 * W), Rect(1, N + W, N + W + 1, N + 2 * W))


def plan_frame(p):
    N, W = p.N, p.W
    outer, inner_bd = p.outer_bd, boundary_of(p.inner)
    side = outer.domain.side_of
    ent = [(u, side(u)) for u in outer.entrance]
    ex = [(v, side(v)) for v in outer.exit]
    c = {
        "A1": sum(1 for u, s in ent if s == "W" and u[1] <= N + W),
        "A4": sum(1 for u, s in ent if s == "W" and u[1] > N + W),
        "B1": sum(1 for u, s in ent if s == "S" and u[0] <= W),
        "B2": sum(1 for u, s in ent if s == "S" and u[0] > W),
        "C2": sum(1 for v, s in ex if s == "E" and v[1] <= W),
        "C3": sum(1 for v, s in ex if s == "E" and v[1] > W),
        "D3": sum(1 for v, s in ex if s == "N" and v[0] > N + W),
        "D4": sum(1 for v, s in ex if s == "N" and v[0] <= N + W),
    }
    iside = inner_bd.domain.side_of
    c["A'"] = sum(1 for u in inner_bd.entrance if iside(u) == "W")
    c["B'"] = sum(1 for u in inner_bd.entrance if iside(u) == "S") - 1
    c["C'"] = sum(1 for v in inner_bd.exit if iside(v) == "E")
    c["D'"] = sum(1 for v in inner_bd.exit if iside(v) == "N") - 1

    empty = not outer.entrance and not inner_bd.entrance
    K1 = 0 if empty else int(p.st.s * W + 1e-12)
    K2 = c["A1"] + c["B1"] - K1 - c["A'"]
    K3 = K2 + c["B2"] - c["C2"] - (c["B'"] + 1)
    K4 = c["C3"] + c["D3"] - K3 - c["C'"]
    if c["A4"] + K1 + c["D'"] + 1 != K4 + c["D4"]:
        raise BalanceViolation(
            "flow balance fails in the north strip: A4 + K1 + D' + 1 = %d, K4 + D4 = %d"
            % (c["A4"] + K1 + c["D'"] + 1, K4 + c["D4"]))
    Ks = (K1, K2, K3, K4)
    if not empty and min(Ks) <= 0:
        raise NegativeFlow(f"non-positive flow (K1..K4) = {Ks}")
    if max(Ks) > W:
        raise CorridorOverflow(f"flow (K1..K4) = {Ks} does not fit in strips of width {W}")
    K = {
        (1, 1): [(x, N + W + 1) for x in range(1, K1 + 1)],
        (1, 2): [(W + 1, y) for y in range(1, K2 + 1)],
        (2, 1): [(W, y) for y in range(1, K2 + 1)],
        (2, 2): [(N + W + x, W + 1) for x in range(1, K3 + 1)],
        (3, 1): [(N + W + x, W) for x in range(1, K3 + 1)],
        (3, 2): [(N + W, N + W + y) for y in range(1, K4 + 1)],
        (4, 1): [(N + W + 1, N + W + y) for y in range(1, K4 + 1)],
        (4, 2): [(x, N + W) for x in range(1, K1 + 1)],
    }
    g = _gammas(N, W)
    return FramePlan(g, K1, K2, K3, K4, K, c, _strip_boundaries(p, g, K, inner_bd))


def _strip_boundaries(p, g, K, inner_bd):
    """Boundary data of each strip: outer data on its outer sides, the inner
    square's crossings and the corridor vertices on its inner sides."""
    N, W = p.N, p.W
    outer = p.outer_bd
    iside = inner_bd.domain.side_of
    in_w = [(W + 1, u[1]) for u in inner_bd.entrance if iside(u) == "W"]   # G1 exits
    in_s = [(u[0], W + 1) for u in inner_bd.entrance if iside(u) == "S"]   # G2 exits
    in_e = [(N + W, v[1]) for v in inner_bd.exit if iside(v) == "E"]       # G3 entrances
    in_n = [(v[0], N + W) for v in inner_bd.exit if iside(v) == "N"]       # G4 entrances
    out = []
    for idx, gm in enumerate(g, start=1):
        ent = [u for u in outer.entrance if gm.side_of(u) in ("S", "W")]
        ex = [v for v in outer.exit if gm.side_of(v) in ("N", "E")]
        if idx == 1:
            ex += K[(1, 1)] + K[(1, 2)] + in_w
        elif idx == 2:
            ent += K[(2, 1)]
            ex += K[(2, 2)] + in_s
        elif idx == 3:
            ent += K[(3, 1)] + K[(3, 2)] + in_e
        else:
            ent += K[(4, 2)] + in_n
            ex += K[(4, 1)]
        out.append(BoundaryData.build(gm, ent, ex))
    return tuple(out)


def nwr_satisfied(p):
    s, t, eta, N, W, R = p.st.s, p.st.t, p.eta, p.N, p.W, p.R
    if s <= 0 or t <= 0:
        return False
    return (min(s * W, t * W) >= 50 * eta * N and R <= eta * N
            and 50 * (1 / s + 1 / t) * R <= W <= N)


def extend_with_diagnostics(p):
    """Returns (Ensemble, diagnostics dict).

    Errors carry a ``stage`` attribute naming the step that failed.
    """
    timings = {}
    t0 = time.perf_counter()
    try:
        plan = plan_frame(p)
    except Exception as err:
        err.stage = "plan"
        raise
    timings["plan"] = time.perf_counter() - t0
    parts = []
    for idx, (gm, bd) in enumerate(zip(plan.gamma, plan.boundaries), start=1):
        t0 = time.perf_counter()
        try:
            parts.append(fill_monotone(gm, bd))
        except Exception as err:
            err.stage = f"gamma{idx}"
            raise
        timings[f"gamma{idx}"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    dom = p.outer
    bits = np.zeros((4, dom.height, dom.width), dtype=np.uint8)
    for e in parts + [p.inner]:
        d = e.domain
        bits[:, d.y_min - 1:d.y_max, d.x_min - 1:d.x_max] = e.bits
    out = Ensemble(dom, bits)
    got = boundary_of(out)
    if got.entrance != p.outer_bd.entrance or got.exit != p.outer_bd.exit:
        raise AssertionError("assembled ensemble has the wrong outer boundary")
    if out.restrict(p.inner_domain) != p.inner:
        raise AssertionError("assembled ensemble does not contain the inner ensemble")
    timings["assemble"] = time.perf_counter() - t0
    diag = {"K1": plan.K1, "K2": plan.K2, "K3": plan.K3, "K4": plan.K4,
            "nwr_satisfied": nwr_satisfied(p), "stage_timings": timings}
    return out, diag


def extend(p):
    return extend_with_diagnostics(p)[0]
