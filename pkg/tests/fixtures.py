"""Hand-transcribed fixtures.

REF_DOMAIN / REF_PATHS / REF_EDGES: a 6 x 7 ensemble with six paths, recorded
twice, once as labelled paths p_{-2}..p_3 and once as a raw list of occupied
edges, so the two encodings can be checked against each other.
"""
from sixvertex.lattice import Rect

REF_DOMAIN = Rect(1, 6, 0, 6)

# index -> vertex sequence from entrance to exit
REF_PATHS = {
    -2: [(5, -1), (5, 0), (6, 0), (6, 1), (6, 2), (7, 2)],
    -1: [(2, -1), (2, 0), (3, 0), (4, 0), (4, 1), (4, 2), (5, 2), (5, 3), (6, 3), (6, 4), (7, 4)],
    0: [(1, -1), (1, 0), (2, 0), (2, 1), (3, 1), (3, 2), (3, 3), (4, 3), (4, 4), (4, 5), (5, 5),
        (5, 6), (6, 6), (6, 7)],
    1: [(0, 1), (1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (3, 4), (3, 5), (3, 6), (4, 6), (4, 7)],
    2: [(0, 3), (1, 3), (1, 4), (1, 5), (2, 5), (2, 6), (3, 6), (3, 7)],
    3: [(0, 5), (1, 5), (1, 6), (2, 6), (2, 7)],
}

REF_ENTRANCE = [(5, -1), (2, -1), (1, -1), (0, 1), (0, 3), (0, 5)]
REF_EXIT = [(7, 2), (7, 4), (6, 7), (4, 7), (3, 7), (2, 7)]

# every occupied edge as (tail, head)
_V = [  # vertical edges (x, y) -> (x, y+1)
    (1, -1), (2, -1), (5, -1),
    (2, 0), (4, 0), (4, 1), (6, 0), (6, 1),
    (1, 1), (3, 1),
    (2, 2), (3, 2), (5, 2),
    (1, 3), (3, 3), (4, 3), (6, 3),
    (3, 4), (1, 4), (4, 4),
    (3, 5), (1, 5), (2, 5), (5, 5),
    (3, 6), (2, 6), (4, 6), (6, 6),
]
_H = [  # horizontal edges (x, y) -> (x+1, y)
    (1, 0), (2, 0), (3, 0), (5, 0),
    (0, 1), (2, 1),
    (1, 2), (4, 2), (6, 2),
    (0, 3), (2, 3), (3, 3), (5, 3),
    (6, 4),
    (0, 5), (1, 5), (4, 5),
    (1, 6), (2, 6), (3, 6), (5, 6),
]
REF_EDGES = [((x, y), (x, y + 1)) for x, y in _V] + [((x, y), (x + 1, y)) for x, y in _H]
