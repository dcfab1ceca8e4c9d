"""Run an experiment config and print the statistics digest.

    python scripts/run_experiment.py configs/desk_scale.json --runs 500
"""
import argparse
import logging
import sys
from pathlib import Path

from mcd_influence.experiment import ExperimentConfig, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--out", help="bundle directory (default: output_dir from the config)")
    ap.add_argument("--runs", type=int)
    ap.add_argument("--workers", type=int)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    cfg = ExperimentConfig.load(args.config)
    d = cfg.to_dict()
    if args.runs:
        d["runs"] = args.runs
    if args.workers:
        d["workers"] = args.workers
    cfg = ExperimentConfig.from_dict(d, base_dir=cfg.base_dir)

    missing = [ds.name for ds in cfg.datasets if ds.path and not (Path(cfg.base_dir) / ds.path).exists()]
    if missing:
        sys.exit(f"missing edge lists for {missing}; place them next to the config or edit the paths")
    out = run_experiment(cfg, args.out)
    print((out / "summary.txt").read_text())
    print(f"bundle: {out}")


if __name__ == "__main__":
    main()
