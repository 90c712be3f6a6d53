"""Vertex weights, the anisotropy parameter and the ferroelectric phase picture.

Weights are stored in configuration-code order (a1, a2, b1, b2, c1, c2), the
same order used by the lattice module and the ensemble file format.  Fields may
be floats or ``fractions.Fraction``; only the exact engine cares which.
"""
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real

from .errors import DegenerateSchedule, NotFerroelectric, SlopeOutOfRange


@dataclass(frozen=True)
class WeightSystem:
    a1: Real
    a2: Real
    b1: Real
    b2: Real
    c1: Real
    c2: Real

    def __post_init__(self):
        for name, v in zip("a1 a2 b1 b2 c1 c2".split(), self.as_tuple()):
            if not v > 0:
                raise ValueError(f"weight {name} must be positive, got {v!r}")

    def as_tuple(self):
        return (self.a1, self.a2, self.b1, self.b2, self.c1, self.c2)

    @property
    def is_exact(self):
        return all(isinstance(v, (int, Fraction)) for v in self.as_tuple())

    @classmethod
    def stochastic(cls, B1, B2):
        return cls(1, 1, B1, B2, 1 - B1, 1 - B2)


@dataclass(frozen=True)
class StochasticParams:
    """(B1, B2) of the stochastic weights (1, 1, B1, B2, 1-B1, 1-B2).

    The open-interval invariant can be relaxed with ``allow_degenerate`` for
    the sampler's deterministic limits (B = 0 or 1).
    """
    B1: Real
    B2: Real
    allow_degenerate: bool = field(default=False, compare=False)

    def __post_init__(self):
        for name, b in (("B1", self.B1), ("B2", self.B2)):
            if self.allow_degenerate:
                ok = 0 <= b <= 1
            else:
                ok = 0 < b < 1
            if not ok:
                raise ValueError(f"{name}={b!r} outside the admissible interval")

    def weights(self):
        return WeightSystem.stochastic(self.B1, self.B2)

    def require_ordered(self):
        if not (0 < self.B1 < self.B2 < 1):
            raise ValueError(f"need 0 < B1 < B2 < 1, got ({self.B1}, {self.B2})")


@dataclass(frozen=True)
class SlopePair:
    s: float
    t: float

    def __post_init__(self):
        if not (0 <= self.s <= 1 and 0 <= self.t <= 1):
            raise ValueError(f"slope ({self.s}, {self.t}) outside [0,1]^2")


@dataclass(frozen=True)
class GaugeParams:
    r: Real
    x: Real
    y: Real
    z: Real

    def __post_init__(self):
        if not all(v > 0 for v in (self.r, self.x, self.y, self.z)):
            raise ValueError("gauge parameters must be positive")


class SlopeClass(enum.Enum):
    InteriorLens = "InteriorLens"
    BoundaryH1 = "BoundaryH1"
    BoundaryH2 = "BoundaryH2"
    Exterior = "Exterior"
    FrozenBoundary = "FrozenBoundary"


def delta(w):
    a = w.a1 * w.a2
    b = w.b1 * w.b2
    c = w.c1 * w.c2
    return float(a + b - c) / (2.0 * math.sqrt(float(a * b)))


def is_ferroelectric(w):
    return delta(w) > 1 and w.a1 * w.a2 > w.b1 * w.b2


def gauge_transform(w, g):
    r, x, y, z = g.r, g.x, g.y, g.z
    return WeightSystem(r * w.a1, r * z * w.a2, r * y * z * w.b1, r * w.b2 / y,
                        r * x * w.c1, r * z * w.c2 / x)


def _root(d):
    # sqrt(D^2 - 1), clamped so D = 1 up to rounding does not produce a nan
    return math.sqrt(max(d * d - 1.0, 0.0))


def to_stochastic(w):
    """Reduce a ferroelectric weight system to stochastic form.

    Returns:
        (StochasticParams, GaugeParams): the gauge maps ``w`` onto
        (1, 1, B1, B2, 1-B1, 1-B2).
    """
    d = delta(w)
    if d < 1 or not w.a1 * w.a2 > w.b1 * w.b2:
        raise NotFerroelectric(f"Delta={d:.6g}, a1a2={w.a1 * w.a2}, b1b2={w.b1 * w.b2}")
    a1, a2, b1, b2, c1, c2 = (float(v) for v in w.as_tuple())
    q = math.sqrt(b1 * b2 / (a1 * a2))
    rt = _root(d)
    B1 = (d - rt) * q
    B2 = (d + rt) * q
    g = GaugeParams(1.0 / a1, (a1 / c1) * (1.0 - B1),
                    (d - rt) * math.sqrt(a2 * b2 / (a1 * b1)), a1 / a2)
    return StochasticParams(B1, B2), g


def kappa(p):
    return (1 - p.B1) / (1 - p.B2)


def phi(p, z):
    k = kappa(p)
    return k * z / ((k - 1) * z + 1)


def phi_inv(p, y):
    k = kappa(p)
    return y / (k - (k - 1) * y)


def h_coefficients(w):
    """Coefficients (c_xy, c_x, c_y) with h(x, y) = c_xy*x*y + c_x*x + c_y*y."""
    d = delta(w)
    if d < 1:
        raise NotFerroelectric(f"Delta={d:.6g} < 1")
    rt = _root(d)
    ratio = math.sqrt(float(w.a1 * w.a2) / float(w.b1 * w.b2))
    cxy, cx = 2.0 * rt, -(ratio - d + rt)
    # cy = ratio - d - rt, written so that h(1, 1) = 0 holds in floating point
    return cxy, cx, -(cxy + cx)


def h_value(w, x, y):
    cxy, cx, cy = h_coefficients(w)
    return cxy * x * y + cx * x + cy * y


def classify_slope(w, st, tol=1e-9):
    cxy, cx, cy = h_coefficients(w)
    s, t = st.s, st.t
    if min(abs(s), abs(1 - s), abs(t), abs(1 - t)) <= tol:
        return SlopeClass.FrozenBoundary
    scale = max(1.0, abs(cxy), abs(cx), abs(cy))
    h1 = cxy * s * t + cx * s + cy * t
    h2 = cxy * t * s + cx * t + cy * s
    if abs(h1) <= tol * scale:
        return SlopeClass.BoundaryH1
    if abs(h2) <= tol * scale:
        return SlopeClass.BoundaryH2
    if max(h1, h2) < -tol * scale:
        return SlopeClass.InteriorLens
    return SlopeClass.Exterior


def project_to_boundary(p, st, tol=1e-12):
    """Slide (s, t) along the ray through the origin onto t = phi(s).

    Returns:
        (SlopePair, float): the point (s0, t0) and vartheta = s/s0 = t/t0.
    """
    p.require_ordered()
    k = kappa(p)
    s, t = st.s, st.t
    if not s > 0:
        raise SlopeOutOfRange("s must be positive")
    if t < s - tol or t > phi(p, s) + tol:
        raise SlopeOutOfRange(f"need s <= t <= phi(s); got s={s}, t={t}, phi(s)={phi(p, s)}")
    num = k * s - t
    s0 = num / ((k - 1) * t)
    t0 = num / ((k - 1) * s)
    vartheta = (k - 1) * s * t / num
    # snap the rounding noise of on-curve input (vartheta = 1 up to ulps)
    if abs(vartheta - 1) < 1e-13:
        s0, t0, vartheta = s, t, 1.0
    return SlopePair(min(s0, 1.0), min(t0, 1.0)), vartheta


def complement_weights(w):
    return WeightSystem(w.b1, w.b2, w.a1, w.a2, w.c1, w.c2)


def reflect_weights(w):
    return WeightSystem(w.a1, w.a2, w.b2, w.b1, w.c2, w.c1)


def stochastic_table(B1, B2):
    """Transition probabilities P[(i2, j2) | (i1, j1)].

    Exact when B1, B2 are Fractions.  Keys are incoming (i1, j1), values map
    outgoing (i2, j2) to probability; zero-probability moves are omitted.
    """
    return {
        (0, 0): {(0, 0): 1},
        (1, 1): {(1, 1): 1},
        (1, 0): {(1, 0): B1, (0, 1): 1 - B1},
        (0, 1): {(0, 1): B2, (1, 0): 1 - B2},
    }


def phase_curves(p, n):
    """n+1 sample points on each hyperbola, as (s, t, curve) rows.

    h1 is the graph t = phi(s), h2 its mirror s = phi(t).
    """
    rows = []
    for i in range(n + 1):
        z = i / n if n else 0.0
        rows.append((z, phi(p, z), "h1"))
    for i in range(n + 1):
        z = i / n if n else 0.0
        rows.append((phi(p, z), z, "h2"))
    return rows


@dataclass(frozen=True)
class Schedule:
    delta: float
    eta: float
    R: int
    s0: float
    t0: float
    vartheta: float
    K: int
    L: int
    W: int
    M: int
    N: int
    s: float
    t: float


# snap values that sit on an integer up to accumulated rounding (a few ulps
# per operation) before taking floor/ceil
def _floor(x):
    return math.floor(x + 1e-13 * max(1.0, abs(x)))


def _ceil(x):
    return math.ceil(x - 1e-13 * max(1.0, abs(x)))


def derive_schedule(p, st, delta_, N):
    if not 0 < delta_ < 1:
        raise ValueError("delta must lie in (0,1)")
    if N < 1:
        raise ValueError("N must be positive")
    s, t = st.s, st.t
    (s0t0, vartheta) = project_to_boundary(p, st)
    s0, t0 = s0t0.s, s0t0.t
    eta = s * t * p.B1 * p.B2 * (1 - p.B1) * (1 - p.B2) * delta_ / 650
    R = _floor(eta * N / 3)
    if R <= 0:
        raise DegenerateSchedule(f"R = floor(eta*N/3) = 0 (eta*N = {eta * N:.3g})")
    K = _floor(s0 ** 2 * t0 ** 2 * eta * R / 16)
    if K <= 0:
        raise DegenerateSchedule(f"K = 0 (R = {R}, eta = {eta:.3g})")
    L = min(_ceil(vartheta * K), K)
    W = _ceil(60 * (1 / s + 1 / t) * eta * N)
    M = -(-(N - 2 * W) // K)
    if M <= 0:
        raise DegenerateSchedule(f"N - 2W = {N - 2 * W} leaves no room for the grid")
    return Schedule(delta_, eta, R, s0, t0, vartheta, K, L, W, M, N, s, t)
