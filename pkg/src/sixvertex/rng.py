"""Counter-based uniforms: u = F(key, x, y) with no hidden state.

Any vertex's uniform can be recomputed from (seed, stream, x, y) alone, which
is what lets two samplers share randomness vertex by vertex and makes output
independent of traversal order.  The mixer is the splitmix64 finaliser applied
to the key and each coordinate in turn, vectorised over numpy uint64 arrays
(numpy's bit generators have no keyed random-access interface).
"""
import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

# streams: which purpose a uniform serves
VERTEX = 0
ENTRANCE = 1
ALT_VERTEX = 2


def mix64_int(z):
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed, rep):
    """Seed of replica ``rep`` in a batch started from ``seed``."""
    return mix64_int((seed & MASK64) ^ mix64_int(rep + _GOLDEN))


def stream_key(seed, stream):
    return mix64_int(mix64_int((seed & MASK64) + _GOLDEN) + stream * 0xD1B54A32D192ED03)


_U1 = np.uint64(_M1)
_U2 = np.uint64(_M2)
_UG = np.uint64(_GOLDEN)
_S30, _S27, _S31, _S11 = (np.uint64(k) for k in (30, 27, 31, 11))


def _mix64(z):
    z = (z ^ (z >> _S30)) * _U1
    z = (z ^ (z >> _S27)) * _U2
    return z ^ (z >> _S31)


def _as_u64(a):
    return np.asarray(a, dtype=np.int64).view(np.uint64)


def uniforms(keys, x, y):
    """Uniforms in [0,1) for keys (uint64, broadcastable) at coordinates x, y."""
    keys = np.asarray(keys, dtype=np.uint64)
    with np.errstate(over="ignore"):
        h = _mix64(keys + _as_u64(x) * _UG)
        h = _mix64(h + _as_u64(y) * _UG)
    return (h >> _S11).astype(np.float64) * (1.0 / 9007199254740992.0)


def keys_for(seeds, stream):
    return np.array([stream_key(s, stream) for s in seeds], dtype=np.uint64)
