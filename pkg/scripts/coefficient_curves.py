"""Sweep nu1, nu2, kappa2 over z = eps*h and write one CSV per coefficient.

Raw partial sums, Shanks-accelerated sums, the coth closed form (nu1) and
the conjectured large-z asymptotes side by side.
"""

import argparse
from dataclasses import dataclass
from pathlib import Path

from holistic_fd.coefficients import (
    asymptote,
    coefficient_csv,
    coefficient_rows,
    extract_coefficients,
)
from holistic_fd.construct import construct_iterative
from holistic_fd.pde import ADVECTION_DIFFUSION


@dataclass
class Fig2Config:
    z_max: float = 8.0
    z_step: float = 0.25
    eps_order: int = 14
    shanks_iterations: int = 3
    out_dir: Path = Path("results/coefficients")


def main(cfg: Fig2Config) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    zs = [i * cfg.z_step for i in range(int(round(cfg.z_max / cfg.z_step)) + 1)]
    series = {}
    for order in (2, 3):
        _, model = construct_iterative(ADVECTION_DIFFUSION, order, cfg.eps_order)
        for c in extract_coefficients(model, source=f"gamma{order}"):
            if (c.name == "nu1") == (order == 2):
                series[c.name] = c
    for name, s in series.items():
        path = cfg.out_dir / f"{name}.csv"
        path.write_text(coefficient_csv(s, zs, cfg.shanks_iterations))
        z, _, acc, _, _, _ = coefficient_rows(s, [cfg.z_max], cfg.shanks_iterations)[0]
        target = asymptote(name, z)
        print(f"{name}: Shanks({z:g}) = {acc:.5f}, conjectured asymptote {target:.5f} "
              f"({100 * abs(acc - target) / abs(target):.1f}% apart) -> {path}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--z-max", type=float, default=Fig2Config.z_max)
    ap.add_argument("--eps-order", type=int, default=Fig2Config.eps_order)
    ap.add_argument("--shanks", type=int, default=Fig2Config.shanks_iterations)
    ap.add_argument("--out-dir", type=Path, default=Fig2Config.out_dir)
    a = ap.parse_args()
    main(Fig2Config(z_max=a.z_max, eps_order=a.eps_order, shanks_iterations=a.shanks,
                    out_dir=a.out_dir))
