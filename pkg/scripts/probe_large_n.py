"""Local search for (n, k)-assignments with few distant disagreements.

Below the size threshold small witnesses beat the greedy assignment; above it
no restart should ever get under the bound.
"""

import argparse
import time
from dataclasses import dataclass

from tvcouple.bounds import lb_kn_condition
from tvcouple.combinatorics import local_search_min_distant


@dataclass
class Config:
    k: int = 2
    ns: tuple = (3, 4, 5, 6, 8, 12, 16, 22)
    restarts: int = 200
    seed: int = 0


def main(cfg: Config):
    print("n  k  threshold  best  below  size-condition  seconds")
    for n in cfg.ns:
        t0 = time.perf_counter()
        r = local_search_min_distant(n, cfg.k, seed=cfg.seed, restarts=cfg.restarts)
        cond = lb_kn_condition(cfg.k, n).holds if cfg.k >= 2 else True
        print(f"{n:<3}{cfg.k:<3}{str(r.threshold):>9}  {r.best:>5}  {int(r.below_threshold):>5}  {int(cond):>14}  {time.perf_counter() - t0:7.1f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=Config.k)
    ap.add_argument("--ns", type=int, nargs="+", default=list(Config.ns))
    ap.add_argument("--restarts", type=int, default=Config.restarts)
    ap.add_argument("--seed", type=int, default=Config.seed)
    args = ap.parse_args()
    main(Config(args.k, tuple(args.ns), args.restarts, args.seed))
