"""Arrow configurations, ensembles on rectangles and their path picture.

A vertex carries four bits (i1, j1; i2, j2): incoming from below, incoming from
the left, outgoing upward, outgoing to the right.  Conservation leaves six
admissible quadruples, coded 0..5 as

    0 a1 (0,0;0,0)   1 a2 (1,1;1,1)   2 b1 (1,0;1,0)
    3 b2 (0,1;0,1)   4 c1 (1,0;0,1)   5 c2 (0,1;1,0)

An Ensemble stores the four bit planes, indexed ``[y - y_min, x - x_min]``, so
that broken configurations can still be represented and reported by
``validate``.

Boundary vertices sit one step outside the rectangle: a domain
[x0, x1] x [y0, y1] has its south boundary on y = y0 - 1, its west boundary on
x = x0 - 1 and so on.  Paths are indexed -B..A: south entrances right to left
(so u_{-B} is the rightmost), then west entrances bottom to top.  Exits run
east bottom to top, then north right to left, so that path i joins u_i to v_i.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import CrossingPaths, InconsistentEnsemble, OutOfDomain

A1, A2, B1, B2, C1, C2 = range(6)
CONFIG_NAMES = ("a1", "a2", "b1", "b2", "c1", "c2")

# (i1, j1, i2, j2) per code
CONFIGS = ((0, 0, 0, 0), (1, 1, 1, 1), (1, 0, 1, 0), (0, 1, 0, 1), (1, 0, 0, 1), (0, 1, 1, 0))
CODE_OF = {q: c for c, q in enumerate(CONFIGS)}

# bits -> code lookup on the packed index i1*8 + j1*4 + i2*2 + j2
_PACKED_TO_CODE = np.full(16, -1, dtype=np.int8)
for _c, (_a, _b, _d, _e) in enumerate(CONFIGS):
    _PACKED_TO_CODE[_a * 8 + _b * 4 + _d * 2 + _e] = _c
_CODE_BITS = np.array(CONFIGS, dtype=np.uint8)


@dataclass(frozen=True)
class Rect:
    x_min: int
    x_max: int
    y_min: int
    y_max: int

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(f"empty rectangle {self}")

    @property
    def width(self):
        return self.x_max - self.x_min + 1

    @property
    def height(self):
        return self.y_max - self.y_min + 1

    @property
    def area(self):
        return self.width * self.height

    def contains(self, x, y):
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def contains_rect(self, other):
        return (self.x_min <= other.x_min and other.x_max <= self.x_max
                and self.y_min <= other.y_min and other.y_max <= self.y_max)

    def side_of(self, v):
        """Boundary side ('S', 'W', 'N', 'E') of a vertex, or None."""
        x, y = v
        if y == self.y_min - 1 and self.x_min <= x <= self.x_max:
            return "S"
        if x == self.x_min - 1 and self.y_min <= y <= self.y_max:
            return "W"
        if y == self.y_max + 1 and self.x_min <= x <= self.x_max:
            return "N"
        if x == self.x_max + 1 and self.y_min <= y <= self.y_max:
            return "E"
        return None

    def vertices(self):
        for y in range(self.y_min, self.y_max + 1):
            for x in range(self.x_min, self.x_max + 1):
                yield (x, y)


def parse_domain(text):
    """'WxH' -> Rect [1, W] x [1, H]."""
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise ValueError(f"bad domain {text!r}, expected WxH") from None
    if w < 1 or h < 1:
        raise ValueError(f"bad domain {text!r}")
    return Rect(1, w, 1, h)


# ---------------------------------------------------------------- boundary data

def _entrance_key(domain, v):
    side = domain.side_of(v)
    if side == "S":
        return (0, -v[0])
    if side == "W":
        return (1, v[1])
    raise ValueError(f"{v} is not on the south or west boundary of {domain}")


def _exit_key(domain, v):
    side = domain.side_of(v)
    if side == "E":
        return (0, v[1])
    if side == "N":
        return (1, -v[0])
    raise ValueError(f"{v} is not on the north or east boundary of {domain}")


@dataclass(frozen=True)
class BoundaryData:
    """Indexed entrance/exit vertices u_{-B}..u_A, v_{-B}..v_A.

    ``exit`` is None for free exit data, which is not the same as an empty
    tuple (an empty tuple says no path leaves).
    """
    domain: Rect
    entrance: tuple
    exit: tuple = None
    B: int = -1

    @property
    def A(self):
        return len(self.entrance) - self.B - 1

    @property
    def n_paths(self):
        return len(self.entrance)

    def indices(self):
        return range(-self.B, self.A + 1)

    def u(self, i):
        return self.entrance[i + self.B]

    def v(self, i):
        return self.exit[i + self.B]

    @classmethod
    def build(cls, domain, entrance, exit=None):
        """Sort raw vertex collections into the indexed convention."""
        entrance = [tuple(int(c) for c in v) for v in entrance]
        ent = sorted(set(entrance), key=lambda v: _entrance_key(domain, v))
        if len(ent) != len(entrance):
            raise ValueError("duplicate entrance vertex")
        B = sum(1 for v in ent if domain.side_of(v) == "S") - 1
        ex = None
        if exit is not None:
            exit = [tuple(int(c) for c in v) for v in exit]
            ex = sorted(set(exit), key=lambda v: _exit_key(domain, v))
            if len(ex) != len(exit):
                raise ValueError("duplicate exit vertex")
            ex = tuple(ex)
        return cls(domain, tuple(ent), ex, B)

    def with_exit(self, exit):
        return BoundaryData.build(self.domain, self.entrance, exit)

    def free(self):
        return BoundaryData(self.domain, self.entrance, None, self.B)

    def side_coords(self, side):
        """Sorted coordinates of the vertices on one side ('S','W','N','E')."""
        pool = self.entrance if side in "SW" else (self.exit or ())
        k = 0 if side in "SN" else 1
        return sorted(v[k] for v in pool if self.domain.side_of(v) == side)

    def is_monotone(self):
        """Componentwise u_i <= v_i for all i (needs exit data)."""
        if self.exit is None or len(self.exit) != len(self.entrance):
            return False
        return all(u[0] <= v[0] and u[1] <= v[1] for u, v in zip(self.entrance, self.exit))


def parse_boundary_spec(text, domain):
    """Parse 'S:1,3 W:2 N:1 E:' into (entrance vertices, exit vertices or None).

    Sides may appear in any order, separated by whitespace or ';'.  The exit
    part is None when neither N nor E is mentioned.
    """
    ent, ex = [], []
    seen_exit = False
    for tok in text.replace(";", " ").split():
        if ":" not in tok:
            raise ValueError(f"bad boundary token {tok!r}")
        side, vals = tok.split(":", 1)
        side = side.strip().upper()
        coords = [int(c) for c in vals.split(",") if c.strip()]
        for c in coords:
            if side == "S":
                ent.append((c, domain.y_min - 1))
            elif side == "W":
                ent.append((domain.x_min - 1, c))
            elif side == "N":
                ex.append((c, domain.y_max + 1))
            elif side == "E":
                ex.append((domain.x_max + 1, c))
            else:
                raise ValueError(f"unknown side {side!r}")
        if side in ("N", "E"):
            seen_exit = True
    for v in ent + ex:
        if domain.side_of(v) is None:
            raise ValueError(f"vertex {v} outside the boundary of {domain}")
    return ent, (ex if seen_exit else None)


def format_boundary_spec(bd, exits=True):
    parts = []
    for side in "SW":
        parts.append(f"{side}:" + ",".join(str(c) for c in bd.side_coords(side)))
    if exits and bd.exit is not None:
        for side in "NE":
            parts.append(f"{side}:" + ",".join(str(c) for c in bd.side_coords(side)))
    return " ".join(parts)


def boundary_from_spec(text, domain):
    ent, ex = parse_boundary_spec(text, domain)
    return BoundaryData.build(domain, ent, ex)


# -------------------------------------------------------------------- ensembles

class Ensemble:
    """Immutable grid of arrow configurations on a Rect."""

    __slots__ = ("domain", "_bits", "_codes")

    def __init__(self, domain, bits):
        bits = np.ascontiguousarray(bits, dtype=np.uint8)
        if bits.shape != (4, domain.height, domain.width):
            raise ValueError(f"bit planes of shape {bits.shape} do not fit {domain}")
        bits.setflags(write=False)
        self.domain = domain
        self._bits = bits
        self._codes = None

    @classmethod
    def from_planes(cls, domain, i1, j1, i2, j2):
        return cls(domain, np.stack([i1, j1, i2, j2]))

    @classmethod
    def from_codes(cls, domain, codes):
        codes = np.asarray(codes)
        if codes.min(initial=0) < 0 or codes.max(initial=0) > 5:
            raise ValueError("configuration codes must lie in 0..5")
        return cls(domain, np.moveaxis(_CODE_BITS[codes], -1, 0))

    @classmethod
    def empty(cls, domain):
        return cls(domain, np.zeros((4, domain.height, domain.width), dtype=np.uint8))

    @classmethod
    def filled(cls, domain, code):
        return cls.from_codes(domain, np.full((domain.height, domain.width), code))

    @property
    def bits(self):
        return self._bits

    @property
    def i1(self):
        return self._bits[0]

    @property
    def j1(self):
        return self._bits[1]

    @property
    def i2(self):
        return self._bits[2]

    @property
    def j2(self):
        return self._bits[3]

    @property
    def codes(self):
        """int8 grid of configuration codes, -1 where conservation fails."""
        if self._codes is None:
            b = self._bits.astype(np.intp)
            c = _PACKED_TO_CODE[b[0] * 8 + b[1] * 4 + b[2] * 2 + b[3]]
            c.setflags(write=False)
            self._codes = c
        return self._codes

    def config(self, x, y):
        self._check(x, y)
        r, c = y - self.domain.y_min, x - self.domain.x_min
        return tuple(int(v) for v in self._bits[:, r, c])

    def _check(self, x, y):
        if not self.domain.contains(x, y):
            raise OutOfDomain(f"({x}, {y}) not in {self.domain}")

    def restrict(self, window):
        if not self.domain.contains_rect(window):
            raise OutOfDomain(f"{window} not inside {self.domain}")
        d = self.domain
        r0, c0 = window.y_min - d.y_min, window.x_min - d.x_min
        sub = self._bits[:, r0:r0 + window.height, c0:c0 + window.width]
        return Ensemble(window, sub.copy())

    def __eq__(self, other):
        if not isinstance(other, Ensemble):
            return NotImplemented
        return self.domain == other.domain and np.array_equal(self._bits, other._bits)

    def __hash__(self):
        return hash((self.domain, self._bits.tobytes()))

    def key(self):
        return self._bits.tobytes()

    def __repr__(self):
        return f"Ensemble({self.domain})"


@dataclass(frozen=True)
class Violation:
    kind: str        # 'conservation', 'vertical', 'horizontal', 'bit'
    vertex: tuple
    detail: str = ""


def validate(e, limit=None):
    """List of violations; empty iff e is a valid six-vertex ensemble."""
    out = []
    b = e.bits.astype(np.int16)
    d = e.domain

    def add(kind, rows, cols, detail):
        for r, c in zip(rows, cols):
            out.append(Violation(kind, (int(c) + d.x_min, int(r) + d.y_min), detail))

    rows, cols = np.nonzero((b > 1).any(axis=0))
    add("bit", rows, cols, "bit value outside {0,1}")
    rows, cols = np.nonzero(b[0] + b[1] != b[2] + b[3])
    add("conservation", rows, cols, "i1 + j1 != i2 + j2")
    rows, cols = np.nonzero(b[2, :-1, :] != b[0, 1:, :])
    add("vertical", rows, cols, "i2 differs from i1 of the vertex above")
    rows, cols = np.nonzero(b[3, :, :-1] != b[1, :, 1:])
    add("horizontal", rows, cols, "j2 differs from j1 of the vertex to the right")
    if limit is not None:
        out = out[:limit]
    return out


def require_valid(e):
    bad = validate(e, limit=3)
    if bad:
        raise InconsistentEnsemble(f"invalid ensemble on {e.domain}: {bad}")


def chi_v(e, x, y):
    e._check(x, y)
    return int(e.i2[y - e.domain.y_min, x - e.domain.x_min])


def chi_h(e, x, y):
    e._check(x, y)
    return int(e.j2[y - e.domain.y_min, x - e.domain.x_min])


def config_counts(e):
    c = e.codes
    if (c < 0).any():
        raise InconsistentEnsemble("conservation violated")
    return np.bincount(c.ravel(), minlength=6)


def log_weight(e, w):
    require_valid(e)
    n = config_counts(e)
    return float(sum(int(k) * math.log(float(v)) for k, v in zip(n, w.as_tuple()) if k))


def weight(e, w):
    """Product of vertex weights; accumulated in log space, so it may underflow
    to 0.0 on large domains even though the true weight is positive."""
    return math.exp(log_weight(e, w))


def boundary_of(e):
    require_valid(e)
    d = e.domain
    south = [(d.x_min + int(c), d.y_min - 1) for c in np.nonzero(e.i1[0])[0]]
    west = [(d.x_min - 1, d.y_min + int(r)) for r in np.nonzero(e.j1[:, 0])[0]]
    north = [(d.x_min + int(c), d.y_max + 1) for c in np.nonzero(e.i2[-1])[0]]
    east = [(d.x_max + 1, d.y_min + int(r)) for r in np.nonzero(e.j2[:, -1])[0]]
    return BoundaryData.build(d, south + west, north + east)


# ------------------------------------------------------------------------- paths

@dataclass(frozen=True)
class PathEnsemble:
    """Paths p_{-B}..p_A, each a tuple of vertices from u_i to v_i inclusive."""
    paths: tuple
    B: int = -1

    @property
    def A(self):
        return len(self.paths) - self.B - 1

    def path(self, i):
        return self.paths[i + self.B]

    def indices(self):
        return range(-self.B, self.A + 1)


def to_paths(e):
    """Trace every path of a valid ensemble.

    At a doubly occupied vertex (1,1;1,1) the path that came from the south
    leaves east and the path from the west leaves north: the two touch and
    bounce, which is what keeps the family non-crossing.
    """
    bd = boundary_of(e)
    d = e.domain
    i2, j2 = e.i2, e.j2
    paths = []
    for u in bd.entrance:
        x, y = u
        if d.side_of(u) == "S":
            y += 1
            came_south = True
        else:
            x += 1
            came_south = False
        pts = [u]
        while d.contains(x, y):
            pts.append((x, y))
            r, c = y - d.y_min, x - d.x_min
            up, right = i2[r, c], j2[r, c]
            if up and right:
                go_up = not came_south
            else:
                go_up = bool(up)
            if go_up:
                y += 1
            else:
                x += 1
            came_south = go_up
        pts.append((x, y))
        paths.append(tuple(pts))
    return PathEnsemble(tuple(paths), bd.B)


def from_paths(p, domain):
    """Rebuild the ensemble of a non-crossing path family.

    Raises CrossingPaths when two paths share an edge or the family is not
    the one that tracing the result gives back (crossing or mis-ordered).
    """
    bits = np.zeros((4, domain.height, domain.width), dtype=np.uint8)
    x0, y0 = domain.x_min, domain.y_min
    for path in p.paths:
        if len(path) < 2:
            raise InconsistentEnsemble(f"path {path} too short")
        if domain.side_of(path[0]) not in ("S", "W") or domain.side_of(path[-1]) not in ("N", "E"):
            raise InconsistentEnsemble(f"path {path[0]}..{path[-1]} does not run boundary to boundary")
        for k, (a, b) in enumerate(zip(path[:-1], path[1:])):
            dx, dy = b[0] - a[0], b[1] - a[1]
            if (dx, dy) == (0, 1):
                out_plane, in_plane = 2, 0
            elif (dx, dy) == (1, 0):
                out_plane, in_plane = 3, 1
            else:
                raise InconsistentEnsemble(f"step {a}->{b} is not a unit north/east step")
            inside_a = domain.contains(*a)
            inside_b = domain.contains(*b)
            if not (inside_a or inside_b):
                raise InconsistentEnsemble(f"edge {a}->{b} lies outside {domain}")
            if (not inside_a and k != 0) or (not inside_b and k != len(path) - 2):
                raise InconsistentEnsemble(f"path leaves {domain} in the middle at {a}->{b}")
            if inside_a:
                if bits[out_plane, a[1] - y0, a[0] - x0]:
                    raise CrossingPaths(f"edge {a}->{b} used twice")
                bits[out_plane, a[1] - y0, a[0] - x0] = 1
            if inside_b:
                if bits[in_plane, b[1] - y0, b[0] - x0]:
                    raise CrossingPaths(f"edge {a}->{b} used twice")
                bits[in_plane, b[1] - y0, b[0] - x0] = 1
    e = Ensemble(domain, bits)
    bad = validate(e, limit=3)
    if bad:
        raise CrossingPaths(f"paths do not form a valid ensemble: {bad}")
    back = to_paths(e)
    if back.paths != tuple(tuple(tuple(v) for v in q) for q in p.paths):
        raise CrossingPaths("path family is crossing or not in index order")
    return e


# --------------------------------------------------------------------- symmetries

def complement_vertical(e):
    """Complement the vertical arrows and flip the rectangle upside down."""
    require_valid(e)
    b = e.bits[:, ::-1, :]
    out = np.stack([1 - b[2], b[1], 1 - b[0], b[3]])
    return Ensemble(e.domain, out)


def reflect_diag(e):
    """Reflect across the line y = x, swapping vertical and horizontal roles."""
    require_valid(e)
    d = e.domain
    b = e.bits
    out = np.stack([b[1].T, b[0].T, b[3].T, b[2].T])
    return Ensemble(Rect(d.y_min, d.y_max, d.x_min, d.x_max), out)


# ---------------------------------------------------------------------- file I/O

MAGIC = "6VE v1"


def write_ensemble(e):
    c = e.codes
    if (c < 0).any():
        raise InconsistentEnsemble("cannot serialise a vertex that violates conservation")
    d = e.domain
    lines = [f"{MAGIC} {d.x_min} {d.x_max} {d.y_min} {d.y_max}"]
    digits = (c + ord("0")).astype(np.uint8)
    for r in range(d.height - 1, -1, -1):
        lines.append(digits[r].tobytes().decode("ascii"))
    return "\n".join(lines) + "\n"


def read_ensemble(text):
    lines = [ln.strip() for ln in text.strip().splitlines()]
    head = lines[0].split()
    if len(head) != 6 or " ".join(head[:2]) != MAGIC:
        raise ValueError(f"not a {MAGIC} file: {lines[0]!r}")
    x0, x1, y0, y1 = (int(v) for v in head[2:])
    d = Rect(x0, x1, y0, y1)
    rows = lines[1:]
    if len(rows) != d.height or any(len(r) != d.width for r in rows):
        raise ValueError(f"grid does not match header {d}")
    if any(ch not in "012345" for r in rows for ch in r):
        raise ValueError("configuration digits must be 0..5")
    codes = np.array([[ord(ch) - 48 for ch in r] for r in reversed(rows)], dtype=np.int8)
    return Ensemble.from_codes(d, codes)


def save_ensemble(e, path):
    with open(path, "w", newline="\n") as f:
        f.write(write_ensemble(e))


def load_ensemble(path):
    with open(path) as f:
        return read_ensemble(f.read())
