"""Largest Q-count found for n = 5..N, next to the min assignment and the pair total."""

import argparse
import time
from dataclasses import dataclass

from tvcouple.combinatorics import q_search


@dataclass
class Config:
    n_max: int = 9
    restarts: int = 50
    seed: int = 0


def main(cfg: Config):
    print("n  best  min(I)  gain  pairs  exhaustive  seconds")
    for n in range(5, cfg.n_max + 1):
        t0 = time.perf_counter()
        r = q_search(n, seed=cfg.seed, restarts=cfg.restarts)
        print(f"{n:<3}{r.best:>4}  {r.min_value:>6}  {r.beats_min_by:>4}  {r.pair_total:>5}  {int(r.exhaustive):>10}  {time.perf_counter() - t0:7.1f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=Config.n_max)
    ap.add_argument("--restarts", type=int, default=Config.restarts)
    ap.add_argument("--seed", type=int, default=Config.seed)
    main(Config(**vars(ap.parse_args())))
