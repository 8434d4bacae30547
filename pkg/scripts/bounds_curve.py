"""Write F and the known lower envelope on a grid, plus the k/n points where F itself is a lower bound."""

import argparse
import csv
from dataclasses import dataclass

from tvcouple.bounds import emit_bounds_curve, kn_points, step_grid
from tvcouple.exact import big_f


@dataclass
class Config:
    step: float = 0.001
    kmax: int = 6
    out: str = "curve.csv"


def main(cfg: Config):
    grid = step_grid(cfg.step)
    curve = emit_bounds_curve(grid)
    with open(cfg.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "F", "lower"])
        w.writerows(curve)
    gap = max(f - low for _, f, low in curve)
    print(f"{len(curve)} rows -> {cfg.out}; largest gap F - lower = {gap:.4f}")
    pts = kn_points(cfg.kmax, x_min=float(grid[0]))
    print(f"{len(pts)} k/n points with F(k/n) forced, k <= {cfg.kmax}; largest:")
    for k, n, x in pts[-5:]:
        print(f"  {k}/{n} = {float(x):.4f}  F = {big_f(float(x)):.4f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--step", type=float, default=Config.step)
    ap.add_argument("--kmax", type=int, default=Config.kmax)
    ap.add_argument("--out", default=Config.out)
    main(Config(**vars(ap.parse_args())))
