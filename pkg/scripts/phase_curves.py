"""Write the two phase-boundary curves of a stochastic system as CSV."""
import argparse
import sys

from sixvertex import weights


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--B1", type=float, default=0.2)
    ap.add_argument("--B2", type=float, default=0.8)
    ap.add_argument("--samples", type=int, default=101)
    ap.add_argument("--grid", type=int, default=0,
                    help="also classify an n x n grid of slopes")
    a = ap.parse_args(argv)
    p = weights.StochasticParams(a.B1, a.B2)
    out = sys.stdout
    out.write("s,t,curve\n")
    for s, t, name in weights.phase_curves(p, a.samples):
        out.write(f"{s!r},{t!r},{name}\n")
    if a.grid:
        w = p.weights()
        out.write("\ns,t,class\n")
        for i in range(a.grid + 1):
            for j in range(a.grid + 1):
                st = weights.SlopePair(i / a.grid, j / a.grid)
                out.write(f"{st.s!r},{st.t!r},{weights.classify_slope(w, st).value}\n")


if __name__ == "__main__":
    main()
