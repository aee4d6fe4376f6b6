"""Max Fourier growth rate against eps*h for the backward model and the series model."""

import argparse
from dataclasses import dataclass
from pathlib import Path

from holistic_fd.construct import construct_iterative
from holistic_fd.pde import ADVECTION_DIFFUSION
from holistic_fd.simulate import STABLE_TOL, back_model, stability_scan


@dataclass
class ScanConfig:
    z_min: float = 0.05
    z_max: float = 3.0
    points: int = 60
    theta_samples: int = 512
    out_dir: Path = Path("results/stability")


def threshold(rows):
    """Smallest sampled z from which every larger sample is stable."""
    for i, (z, _) in enumerate(rows):
        if all(g <= STABLE_TOL for _, g in rows[i:]):
            return z
    return None


def main(cfg: ScanConfig) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    step = (cfg.z_max - cfg.z_min) / (cfg.points - 1)
    zs = [cfg.z_min + i * step for i in range(cfg.points)]
    _, series_model = construct_iterative(ADVECTION_DIFFUSION, 2, 10)
    for name, model in (("back", back_model()), ("series_l2", series_model)):
        rows = stability_scan(model, zs, samples=cfg.theta_samples)
        path = cfg.out_dir / f"{name}.csv"
        path.write_text("eps_h,max_growth\n" + "".join(f"{z:.12e},{g:.12e}\n" for z, g in rows))
        print(f"{name}: stable from eps*h = {threshold(rows)} on this grid -> {path}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=ScanConfig.out_dir)
    main(ScanConfig(out_dir=ap.parse_args().out_dir))
