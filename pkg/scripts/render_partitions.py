"""SVG pictures of the simplex partition for both couplings over a few seeds."""

import argparse
from dataclasses import dataclass
from pathlib import Path

from tvcouple.render import render_simplex


@dataclass
class Config:
    seeds: tuple = (0, 1, 2)
    resolution: int = 300
    out_dir: str = "figures"


def main(cfg: Config):
    out = Path(cfg.out_dir)
    out.mkdir(exist_ok=True)
    for seed in cfg.seeds:
        for kind in ("ii", "i"):
            r = render_simplex(kind, seed, cfg.resolution)
            path = out / f"partition_{kind}_{seed}.svg"
            path.write_text(r.svg)
            areas = ", ".join(f"{a:.3f}" for a in r.region_areas())
            print(f"{path}: areas {areas}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, nargs="+", default=list(Config.seeds))
    ap.add_argument("--resolution", type=int, default=Config.resolution)
    ap.add_argument("--out-dir", default=Config.out_dir)
    args = ap.parse_args()
    main(Config(tuple(args.seeds), args.resolution, args.out_dir))
