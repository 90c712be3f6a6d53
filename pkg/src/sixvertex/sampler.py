"""Markovian sampling of the stochastic six-vertex model.

Vertices are completed diagonal by diagonal (x + y increasing); on a given
diagonal every vertex already knows its incoming arrows, so a whole diagonal
of a whole batch of replicas is one vectorised step.  The uniform used at
vertex (x, y) is ``rng.uniforms(key, x, y)``, a pure function of the seed and
the coordinates.

Completion rule with uniform U:
    (1,0) in: straight up if U < B1, else turn east
    (0,1) in: straight east if U < B2, else turn up
"""
from dataclasses import dataclass, replace

import numpy as np

from . import rng
from .errors import SpecMismatch
from .lattice import BoundaryData, Ensemble, Rect, to_paths
from .restriction import RestrictionParams, index_sets, restrict_boundary, restrict_ensemble
from .weights import StochasticParams, phi


@dataclass(frozen=True)
class Explicit:
    vertices: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(tuple(v) for v in self.vertices))


@dataclass(frozen=True)
class DoubleSidedBernoulli:
    """Independent entrances: rho1 on the west side, rho2 on the south side."""
    rho1: float
    rho2: float

    def __post_init__(self):
        if not (0 <= self.rho1 <= 1 and 0 <= self.rho2 <= 1):
            raise ValueError(f"Bernoulli densities ({self.rho1}, {self.rho2}) outside [0,1]")


@dataclass(frozen=True)
class SamplerSpec:
    params: StochasticParams
    domain: Rect
    entrance: object
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.entrance, BoundaryData):
            object.__setattr__(self, "entrance", Explicit(self.entrance.entrance))
        elif not isinstance(self.entrance, (Explicit, DoubleSidedBernoulli)):
            object.__setattr__(self, "entrance", Explicit(self.entrance))
        if isinstance(self.entrance, Explicit):
            for v in self.entrance.vertices:
                if self.domain.side_of(v) not in ("S", "W"):
                    raise ValueError(f"entrance {v} not on the south/west boundary of {self.domain}")


@dataclass
class CoupledPair:
    primary_ensemble: Ensemble
    secondary_ensemble: Ensemble
    agreement_mask: np.ndarray


_DIAG_CACHE = {}


def _diagonals(W, H):
    key = (W, H)
    if key not in _DIAG_CACHE:
        out = []
        for d in range(W + H - 1):
            cols = np.arange(max(0, d - H + 1), min(d, W - 1) + 1)
            rows = d - cols
            out.append((rows, cols))
        _DIAG_CACHE[key] = out
    return _DIAG_CACHE[key]


def _entrance_bits(spec, seeds):
    d = spec.domain
    R = len(seeds)
    if isinstance(spec.entrance, Explicit):
        south = np.zeros(d.width, dtype=np.uint8)
        west = np.zeros(d.height, dtype=np.uint8)
        for x, y in spec.entrance.vertices:
            if d.side_of((x, y)) == "S":
                south[x - d.x_min] = 1
            else:
                west[y - d.y_min] = 1
        return np.broadcast_to(south, (R, d.width)), np.broadcast_to(west, (R, d.height))
    keys = rng.keys_for(seeds, rng.ENTRANCE)[:, None]
    xs = np.arange(d.x_min, d.x_max + 1)
    ys = np.arange(d.y_min, d.y_max + 1)
    us = rng.uniforms(keys, xs[None, :], np.full((1, d.width), d.y_min - 1))
    uw = rng.uniforms(keys, np.full((1, d.height), d.x_min - 1), ys[None, :])
    south = (us < spec.entrance.rho2).astype(np.uint8)
    west = (uw < spec.entrance.rho1).astype(np.uint8)
    return south, west


def _sweep(domain, B1, B2, south, west, uniform_fn):
    """Complete all vertices; returns bits of shape (R, 4, H, W).

    ``uniform_fn(rows, cols, i1, j1)`` gives the (R, n) uniforms for one
    diagonal given its incoming bits.
    """
    R = south.shape[0]
    W, H = domain.width, domain.height
    bits = np.zeros((R, 4, H, W), dtype=np.uint8)
    for rows, cols in _diagonals(W, H):
        bottom = rows == 0
        left = cols == 0
        i1 = np.where(bottom, south[:, cols], bits[:, 2, np.maximum(rows - 1, 0), cols])
        j1 = np.where(left, west[:, rows], bits[:, 3, rows, np.maximum(cols - 1, 0)])
        u = uniform_fn(rows, cols, i1, j1)
        tot = i1 + j1
        turn_or_not = np.where(i1 == 1, u < B1, u >= B2)
        i2 = np.where(tot == 1, turn_or_not, tot >> 1).astype(np.uint8)
        j2 = (tot - i2).astype(np.uint8)
        bits[:, 0, rows, cols] = i1
        bits[:, 1, rows, cols] = j1
        bits[:, 2, rows, cols] = i2
        bits[:, 3, rows, cols] = j2
    return bits


def _hash_uniforms(domain, keys):
    keys = keys[:, None]

    def fn(rows, cols, i1, j1):
        return rng.uniforms(keys, (cols + domain.x_min)[None, :], (rows + domain.y_min)[None, :])
    return fn


def sample_bits(spec, seeds):
    """Raw batch: one replica per seed, bits of shape (len(seeds), 4, H, W)."""
    seeds = list(seeds)
    south, west = _entrance_bits(spec, seeds)
    keys = rng.keys_for(seeds, rng.VERTEX)
    return _sweep(spec.domain, spec.params.B1, spec.params.B2, south, west,
                  _hash_uniforms(spec.domain, keys))


def sample(spec):
    return Ensemble(spec.domain, sample_bits(spec, [spec.seed])[0])


def replica_seeds(seed, reps):
    return [rng.derive_seed(seed, r) for r in range(reps)]


def sample_many(spec, reps, chunk=1024, threads=1):
    """Replica r is ``sample(replace(spec, seed=derive_seed(spec.seed, r)))``."""
    seeds = replica_seeds(spec.seed, reps)
    chunks = [seeds[a:a + chunk] for a in range(0, reps, chunk)]
    if threads > 1 and len(chunks) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(threads) as pool:
            for bits in pool.map(lambda c: sample_bits(spec, c), chunks):
                for b in bits:
                    yield Ensemble(spec.domain, b)
        return
    for c in chunks:
        for b in sample_bits(spec, c):
            yield Ensemble(spec.domain, b)


def mu_spec(p, rho, window, seed, margin=0):
    p.require_ordered()
    if not 0 <= rho <= 1:
        raise ValueError(f"rho={rho} outside [0,1]")
    quad = Rect(window.x_min - margin, window.x_max, window.y_min - margin, window.y_max)
    return SamplerSpec(p, quad, DoubleSidedBernoulli(phi(p, rho), rho), seed)


def sample_mu_window(p, rho, window, seed, margin=0):
    """Exact sample of the translation-invariant Bernoulli state on a window.

    The quadrant model with independent Bernoulli entrances (phi(rho) on the
    west, rho on the south) induces the same i.i.d. law on every row and
    column from any corner onward, so the window itself can serve as the
    quadrant (``margin=0``); a positive margin samples a larger south-west
    region and crops, which has the same law.
    """
    spec = mu_spec(p, rho, window, seed, margin)
    e = sample(spec)
    return e if margin == 0 else e.restrict(window)


def _mask(a, b):
    return (a.bits == b.bits).all(axis=0)


def couple_grand(spec_a, spec_b):
    """Drive two specs with the same per-vertex uniforms."""
    if spec_a.params != spec_b.params or spec_a.domain != spec_b.domain or spec_a.seed != spec_b.seed:
        raise SpecMismatch("grand coupling needs equal params, domain and seed")
    ea, eb = sample(spec_a), sample(spec_b)
    return CoupledPair(ea, eb, _mask(ea, eb))


@dataclass
class RestrictionDiagnostics:
    kept: list
    R_set: list
    S_set: list
    upsilon_held: bool
    secondary_equals_restriction: bool
    restricted: Ensemble


def couple_restriction(entrance, L, K, params, domain, seed):
    """Run the model from u and from its (L; K)-restriction u' side by side.

    Off removed paths (and with equal incoming arrows) both use the same
    uniform; elsewhere the secondary draws from an independent stream.
    Returns (CoupledPair, RestrictionDiagnostics).
    """
    rp = RestrictionParams(L, K)
    bd = entrance if isinstance(entrance, BoundaryData) else BoundaryData.build(domain, entrance)
    spec = SamplerSpec(params, domain, Explicit(bd.entrance), seed)
    primary = sample(spec)
    pe = to_paths(primary)
    W, H = domain.width, domain.height
    removed = np.zeros((H, W), dtype=bool)
    for i, path in zip(pe.indices(), pe.paths):
        if not rp.keeps(i):
            for x, y in path[1:-1]:
                removed[y - domain.y_min, x - domain.x_min] = True

    sub = restrict_boundary(bd, rp)
    spec2 = SamplerSpec(params, domain, Explicit(sub.entrance), seed)
    south, west = _entrance_bits(spec2, [seed])
    k0 = rng.keys_for([seed], rng.VERTEX)[:, None]
    k2 = rng.keys_for([seed], rng.ALT_VERTEX)[:, None]
    pb = primary.bits

    def fn(rows, cols, i1, j1):
        xs = (cols + domain.x_min)[None, :]
        ys = (rows + domain.y_min)[None, :]
        same = (~removed[rows, cols])[None, :] & (i1 == pb[0, rows, cols]) & (j1 == pb[1, rows, cols])
        return np.where(same, rng.uniforms(k0, xs, ys), rng.uniforms(k2, xs, ys))

    secondary = Ensemble(domain, _sweep(domain, params.B1, params.B2, south, west, fn)[0])

    kept, r_set, s_set = index_sets(bd.B, bd.A, rp)
    held = True
    sb = secondary.bits
    for lo_idx, need in [(r, "east") for r in r_set] + [(s - 1, "north") for s in s_set]:
        common = set(pe.path(lo_idx)[1:-1]) & set(pe.path(lo_idx + 1)[1:-1])
        for x, y in common:
            r, c = y - domain.y_min, x - domain.x_min
            if need == "east" and sb[3, r, c] < sb[0, r, c]:
                held = False
            if need == "north" and sb[2, r, c] < sb[1, r, c]:
                held = False
    restricted = restrict_ensemble(primary, rp)
    diag = RestrictionDiagnostics(kept, r_set, s_set, held, secondary == restricted, restricted)
    if held and not diag.secondary_equals_restriction:
        raise AssertionError("event Upsilon held but the secondary differs from the restriction")
    return CoupledPair(primary, secondary, _mask(primary, secondary)), diag


def with_seed(spec, seed):
    return replace(spec, seed=seed)
