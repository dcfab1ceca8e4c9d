"""Report the two desk-scale trends for each dataset in a bundle.

(a) fractions where MCD's average spreader distance is at least that of DEG and HI;
(b) methods whose final infected scale ever drops as the fraction grows.
"""
import argparse
from collections import defaultdict

from mcd_influence.experiment import read_results


def main():
    ap = argparse.ArgumentParser(description="desk-scale trend report")
    ap.add_argument("bundle")
    args = ap.parse_args()

    by_ds = defaultdict(lambda: defaultdict(dict))
    for r in read_results(args.bundle):
        by_ds[r["dataset"]][r["method"]][float(r["fraction"])] = r

    for ds, methods in by_ds.items():
        fractions = sorted(next(iter(methods.values())))
        wins = 0
        for f in fractions:
            ls = {m: methods[m][f]["ls"] for m in ("MCD", "DEG", "HI") if m in methods}
            if ls.get("MCD") and all(v == "" or float(ls["MCD"]) >= float(v) for v in ls.values()):
                wins += 1
        drops = [m for m, cells in methods.items()
                 if any(float(cells[b]["scale"]) < float(cells[a]["scale"]) for a, b in zip(fractions, fractions[1:]))]
        print(f"{ds:24s} (a) {wins}/{len(fractions)} fractions   (b) drops: {', '.join(drops) or 'none'}")


if __name__ == "__main__":
    main()
