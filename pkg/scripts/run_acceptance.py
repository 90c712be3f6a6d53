"""Run the acceptance suite and print one line per criterion."""
import argparse
import json
import sys

from sixvertex.verify import run_suite


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--level", choices=("fast", "full"), default="full")
    ap.add_argument("--only", help="comma-separated criterion numbers")
    ap.add_argument("--json")
    a = ap.parse_args(argv)
    only = [int(v) for v in a.only.split(",")] if a.only else None
    res = run_suite(a.level, only=only, echo=print)
    print(f"{sum(r.passed for r in res)}/{len(res)} criteria pass")
    if a.json:
        with open(a.json, "w") as f:
            json.dump([r.as_dict() for r in res], f, indent=2)
    return 0 if all(r.passed for r in res) else 1


if __name__ == "__main__":
    sys.exit(main())
