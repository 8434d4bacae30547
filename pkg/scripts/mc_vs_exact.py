"""Monte Carlo disagreement of both couplings against the closed forms on random pairs."""

import argparse
import math
from dataclasses import dataclass

import numpy as np

from tvcouple.dist import DiscreteDistribution, Family, tv_distance
from tvcouple.exact import agreement, big_f
from tvcouple.mc import mc_estimate


@dataclass
class Config:
    pairs: int = 20
    n: int = 100_000
    max_size: int = 6
    seed: int = 0


def random_pair(rng, size):
    return tuple(DiscreteDistribution(range(size), rng.dirichlet(np.ones(size))) for _ in range(2))


def main(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    print("pair  tv      F(tv)   exact_ii  z_ii    exact_i   z_i")
    zs = []
    for r in range(cfg.pairs):
        p, q = random_pair(rng, int(rng.integers(2, cfg.max_size + 1)))
        fam = Family(("p", "q"), (p, q))
        row = [f"{r:<4}", f"{tv_distance(p, q):.4f}", f"{big_f(tv_distance(p, q)):.4f}"]
        for kind in ("ii", "i"):
            (est,) = mc_estimate(fam, kind, [("p", "q")], cfg.n, seed=cfg.seed * 1000 + r)
            exact = agreement(p, q, kind).disagreement
            z = (est.estimate - exact) / math.sqrt(exact * (1 - exact) / cfg.n)
            zs.append(z)
            row += [f"{exact:.4f}", f"{z:+.2f}"]
        print("  ".join(row))
    print(f"max |z| over {len(zs)} estimates: {max(map(abs, zs)):.2f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=Config.pairs)
    ap.add_argument("--n", type=int, default=Config.n)
    ap.add_argument("--max-size", type=int, default=Config.max_size)
    ap.add_argument("--seed", type=int, default=Config.seed)
    main(Config(**vars(ap.parse_args())))
