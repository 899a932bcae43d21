"""Write the standard level-set slices, region boundary and orbit scatters.

    python scripts/figures.py --out figures/
"""

import argparse
import os
from dataclasses import dataclass

from charvar.charspace import Character
from charvar.dynamics import Box, OrbitPolicy, orbit_array, sample_level_set
from charvar.render import Canvas, render_level_contour, render_orbit_scatter


@dataclass
class Config:
    out: str = "figures"
    size: int = 400
    steps: int = 20000
    seed: int = 0


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default=Config.out)
    p.add_argument("--size", type=int, default=Config.size)
    p.add_argument("--steps", type=int, default=Config.steps)
    p.add_argument("--seed", type=int, default=Config.seed)
    cfg = Config(**vars(p.parse_args()))
    os.makedirs(cfg.out, exist_ok=True)
    wide = Canvas(cfg.size, cfg.size, (-6, 6, -6, 6))

    jobs = {
        "level_-2_z0.svg": render_level_contour(-2, "xy", 0, wide),
        "level_2_z2.svg": render_level_contour(2, "xy", 2, wide),
        "level_2.1_z0.svg": render_level_contour(2.1, "xy", 0, wide),
        "level_19_region.svg": render_level_contour(19, "xy", -3, wide, region=True),
        "level_0_yz.ppm": render_level_contour(0, "yz", 0.5, wide, fmt="ppm"),
    }
    box = Box.cube(2.0)
    start = sample_level_set(0.0, 1, box, seed=cfg.seed).points[0]
    orb = orbit_array(Character(*map(float, start)), OrbitPolicy.uniform(cfg.seed), cfg.steps)
    square = Canvas(cfg.size, cfg.size, (-2.2, 2.2, -2.2, 2.2))
    jobs["orbit_t0.ppm"] = render_orbit_scatter(orb, "xy", square, fmt="ppm", t=0.0)
    jobs["samples_t0.ppm"] = render_orbit_scatter(sample_level_set(0.0, cfg.steps, box, seed=cfg.seed), "xy", square, fmt="ppm", t=0.0)
    octant = orbit_array(Character(-3.0, -3.0, -3.0), OrbitPolicy.uniform(cfg.seed, window=Box.cube(60.0)), cfg.steps)
    jobs["orbit_octant_t52.svg"] = render_orbit_scatter(octant, "xy", Canvas(cfg.size, cfg.size, (-60, 60, -60, 60)), t=52.0)

    for name, img in jobs.items():
        img.save(os.path.join(cfg.out, name))
        print(f"{name}: {len(img.data)} bytes, {len(img.segments)} segments, {len(img.markers)} markers, dropped {img.dropped}")


if __name__ == "__main__":
    main()
