"""Grand coupling with entrance data that differ only left of an interval.

For half-width n the domain is [1, 4n] x [1, n].  Both runs share the south
entrances on [n, 4n] (i.i.d. Bernoulli(1/2)) and draw those on [1, n-1]
independently.  Reported: the fraction of vertices in the box
[2n - n/2, 2n + n/2] x [1, n/2] where the two ensembles disagree.
"""
import argparse
import csv
import sys

import numpy as np

from sixvertex import sampler
from sixvertex.lattice import Rect
from sixvertex.weights import StochasticParams


def disagreement(n, seed, p):
    rng = np.random.default_rng(seed)
    d = Rect(1, 4 * n, 1, n)
    common = rng.random(4 * n) < 0.5
    left_a = rng.random(n - 1) < 0.5
    left_b = rng.random(n - 1) < 0.5
    ents = []
    for left in (left_a, left_b):
        occ = common.copy()
        occ[:n - 1] = left
        ents.append([(x + 1, 0) for x in np.flatnonzero(occ)])
    a = sampler.SamplerSpec(p, d, ents[0], seed)
    b = sampler.SamplerSpec(p, d, ents[1], seed)
    mask = sampler.couple_grand(a, b).agreement_mask
    box = mask[: n // 2, 2 * n - n // 2 - 1: 2 * n + n // 2]
    return 1.0 - box.mean()


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--B1", type=float, default=0.2)
    ap.add_argument("--B2", type=float, default=0.8)
    ap.add_argument("--sizes", default="8,16,32,64,128")
    ap.add_argument("--seeds", type=int, default=200)
    a = ap.parse_args(argv)
    p = StochasticParams(a.B1, a.B2)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "seeds", "mean_disagreement", "stderr", "any_disagreement"])
    for n in (int(v) for v in a.sizes.split(",")):
        vals = np.array([disagreement(n, s, p) for s in range(a.seeds)])
        w.writerow([n, a.seeds, f"{vals.mean():.5f}", f"{vals.std(ddof=1) / np.sqrt(len(vals)):.5f}",
                    f"{(vals > 0).mean():.3f}"])


if __name__ == "__main__":
    main()
