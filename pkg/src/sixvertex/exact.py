"""Exhaustive enumeration and transfer-matrix partition functions.

Two independent routes to the same sums:

* ``enumerate_ensembles`` walks the vertices diagonal by diagonal (x + y
  increasing), branching only where exactly one path arrives, and prunes on
  fixed exit data as soon as an edge leaves the rectangle.
* ``_transfer`` sweeps row-major with a broken-line state (the vertical bits
  under the current row plus the horizontal carry), so its cost is governed by
  the width rather than the number of ensembles.

The float backend enumerates; 'transfer' runs the sweep in floats; 'rational'
runs the sweep with Fractions and refuses float weights.
"""
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainTooLarge, EmptyEnsembleClass, InconsistentBoundary
from .lattice import CODE_OF, BoundaryData, Ensemble, config_counts

ENUMERATION_CAP = 36
TRANSFER_WIDTH_CAP = 24


@dataclass(frozen=True)
class PartitionResult:
    log_Z: float
    ensemble_count: int
    Z_rational: Fraction = None

    @property
    def Z(self):
        return self.Z_rational if self.Z_rational is not None else math.exp(self.log_Z)


def _side_bits(domain, entrance, exit):
    """Boundary vertices -> per-side bit lists (exit sides None if free)."""
    if isinstance(entrance, BoundaryData):
        if exit is None:
            exit = entrance.exit
        entrance = entrance.entrance
    entrance = [tuple(v) for v in entrance]
    south = [0] * domain.width
    west = [0] * domain.height
    for v in entrance:
        side = domain.side_of(v)
        if side == "S":
            south[v[0] - domain.x_min] = 1
        elif side == "W":
            west[v[1] - domain.y_min] = 1
        else:
            raise InconsistentBoundary(f"entrance {v} not on the south/west boundary of {domain}")
    if len(set(entrance)) != len(entrance):
        raise InconsistentBoundary("repeated entrance vertex")
    if exit is None:
        return south, west, None, None
    exit = [tuple(v) for v in exit]
    if len(exit) != len(entrance) or len(set(exit)) != len(exit):
        raise InconsistentBoundary(f"{len(entrance)} entrances but {len(exit)} distinct exits")
    north = [0] * domain.width
    east = [0] * domain.height
    for v in exit:
        side = domain.side_of(v)
        if side == "N":
            north[v[0] - domain.x_min] = 1
        elif side == "E":
            east[v[1] - domain.y_min] = 1
        else:
            raise InconsistentBoundary(f"exit {v} not on the north/east boundary of {domain}")
    return south, west, north, east


def _iter_codes(domain, entrance, exit, cap):
    if domain.area > cap:
        raise DomainTooLarge(f"{domain.area} vertices exceeds the enumeration cap {cap}")
    south, west, north, east = _side_bits(domain, entrance, exit)
    W, H = domain.width, domain.height
    order = sorted(((c, r) for r in range(H) for c in range(W)), key=lambda p: (p[0] + p[1], p[0]))
    n = len(order)
    up = [[0] * W for _ in range(H)]
    right = [[0] * W for _ in range(H)]
    codes = [0] * (W * H)

    def rec(k):
        if k == n:
            yield tuple(codes)
            return
        c, r = order[k]
        i1 = up[r - 1][c] if r else south[c]
        j1 = right[r][c - 1] if c else west[r]
        if i1 + j1 == 1:
            options = ((1, 0), (0, 1))
        else:
            options = ((i1, j1),)
        for i2, j2 in options:
            if north is not None and r == H - 1 and i2 != north[c]:
                continue
            if east is not None and c == W - 1 and j2 != east[r]:
                continue
            up[r][c] = i2
            right[r][c] = j2
            codes[r * W + c] = CODE_OF[(i1, j1, i2, j2)]
            yield from rec(k + 1)

    yield from rec(0)


def enumerate_ensembles(domain, entrance, exit=None, cap=ENUMERATION_CAP):
    """Yield every ensemble with the given entrance (and exit, unless free).

    An unsatisfiable but well-formed boundary simply yields nothing; malformed
    data (vertices off the boundary, count mismatch) raises
    InconsistentBoundary.
    """
    shape = (domain.height, domain.width)
    for codes in _iter_codes(domain, entrance, exit, cap):
        yield Ensemble.from_codes(domain, np.array(codes, dtype=np.int8).reshape(shape))


def _weight_of_codes(codes, table):
    out = 1
    for c in codes:
        out = out * table[c]
    return out


def exact_weight(e, w):
    """Weight as an exact product (Fraction/int weights give an exact result)."""
    n = config_counts(e)
    out = 1
    for k, v in zip(n, w.as_tuple()):
        out = out * v ** int(k)
    return out


def _transfer(domain, table, entrance, exit, width_cap, zero):
    if domain.width > width_cap:
        raise DomainTooLarge(f"width {domain.width} exceeds the transfer cap {width_cap}")
    south, west, north, east = _side_bits(domain, entrance, exit)
    W, H = domain.width, domain.height
    mask0 = sum(b << c for c, b in enumerate(south))
    rows = {mask0: (1, 1)}
    for r in range(H):
        states = {(m, west[r]): vn for m, vn in rows.items()}
        for c in range(W):
            bit = 1 << c
            nxt = {}
            top = north is not None and r == H - 1
            edge = east is not None and c == W - 1
            for (m, h), (val, cnt) in states.items():
                i1 = 1 if m & bit else 0
                if i1 + h == 1:
                    options = ((1, 0), (0, 1))
                else:
                    options = ((i1, h),)
                for i2, j2 in options:
                    if top and i2 != north[c]:
                        continue
                    if edge and j2 != east[r]:
                        continue
                    key = ((m | bit) if i2 else (m & ~bit), j2)
                    wt = table[CODE_OF[(i1, h, i2, j2)]]
                    old = nxt.get(key)
                    if old is None:
                        nxt[key] = (val * wt, cnt)
                    else:
                        nxt[key] = (old[0] + val * wt, old[1] + cnt)
            states = nxt
        rows = {}
        for (m, h), (val, cnt) in states.items():
            old = rows.get(m)
            rows[m] = (val, cnt) if old is None else (old[0] + val, old[1] + cnt)
    total, count = zero, 0
    for val, cnt in rows.values():
        total = total + val
        count += cnt
    return total, count


def partition_function(domain, w, entrance, exit=None, backend="float",
                       cap=ENUMERATION_CAP, width_cap=TRANSFER_WIDTH_CAP):
    """Z over the ensembles with the given entrance (and exit, unless free).

    Args:
        backend: 'float' (enumeration), 'transfer' (row sweep in floats) or
            'rational' (row sweep in exact arithmetic; needs int/Fraction
            weights).
    """
    table = w.as_tuple()
    if backend == "float":
        table = tuple(float(v) for v in table)
        total, count = 0.0, 0
        for codes in _iter_codes(domain, entrance, exit, cap):
            total += _weight_of_codes(codes, table)
            count += 1
        return PartitionResult(math.log(total) if total > 0 else -math.inf, count)
    if backend == "transfer":
        total, count = _transfer(domain, tuple(float(v) for v in table), entrance, exit,
                                 width_cap, 0.0)
        return PartitionResult(math.log(total) if total > 0 else -math.inf, count)
    if backend == "rational":
        if not w.is_exact:
            raise TypeError("rational backend needs int or Fraction weights, got floats")
        table = tuple(Fraction(v) for v in table)
        total, count = _transfer(domain, table, entrance, exit, width_cap, Fraction(0))
        log_z = math.log(total) if total > 0 else -math.inf
        return PartitionResult(log_z, count, Fraction(total))
    raise ValueError(f"unknown backend {backend!r}")


class Distribution:
    """A finite law over ensembles, keyed by the ensemble itself."""

    def __init__(self, probs):
        self._p = dict(probs)

    def __len__(self):
        return len(self._p)

    def items(self):
        return self._p.items()

    def prob(self, e):
        return self._p.get(e, 0.0)

    def support(self):
        return list(self._p)

    def total(self):
        return sum(self._p.values())

    def tv(self, other):
        keys = set(self._p) | set(other._p)
        return 0.5 * sum(abs(float(self.prob(k)) - float(other.prob(k))) for k in keys)


def gibbs_conditional(domain, w, boundary, cap=ENUMERATION_CAP):
    """Law w(E)/Z on the ensembles with the full boundary data given."""
    if boundary.exit is None:
        raise InconsistentBoundary("gibbs_conditional needs exit data")
    exact = w.is_exact
    pairs = []
    for e in enumerate_ensembles(domain, boundary.entrance, boundary.exit, cap):
        pairs.append((e, exact_weight(e, w) if exact else _float_weight(e, w)))
    if not pairs:
        raise EmptyEnsembleClass(f"no ensemble on {domain} has boundary {boundary}")
    Z = sum(v for _, v in pairs)
    return Distribution({e: v / Z for e, v in pairs})


def _float_weight(e, w):
    # direct product: small domains only, no underflow concern
    n = config_counts(e)
    out = 1.0
    for k, v in zip(n, w.as_tuple()):
        out *= float(v) ** int(k)
    return out


def stochastic_law(domain, p, entrance, cap=ENUMERATION_CAP):
    """Free-exit law of the stochastic model as {ensemble: probability}."""
    table = p.weights().as_tuple()
    shape = (domain.height, domain.width)
    out = {}
    for codes in _iter_codes(domain, entrance, None, cap):
        wt = _weight_of_codes(codes, table)
        if wt:
            out[Ensemble.from_codes(domain, np.array(codes, dtype=np.int8).reshape(shape))] = wt
    return out


def exact_event_probability(domain, p, entrance, event, cap=ENUMERATION_CAP):
    """Probability of ``event`` under the free-exit stochastic model.

    Exact (a Fraction) when B1, B2 are Fractions.
    """
    total = 0
    for e, wt in stochastic_law(domain, p, entrance, cap).items():
        if event(e):
            total = total + wt
    return total
