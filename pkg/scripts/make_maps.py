#!/usr/bin/env python3
"""Regenerate the bundled scenario maps.

museum: 40 m x 12 m exhibition hall with two rows of square pillars.
library: 20 m x 12.5 m room with scattered rectangular obstacles.
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from tdle.world import GroundTruthMap, save_ground_truth  # noqa: E402

RES = 0.1
WALL = 0.3


def blank(width_m: float, height_m: float) -> GroundTruthMap:
    nx, ny = round(width_m / RES), round(height_m / RES)
    occ = np.zeros((ny, nx), dtype=bool)
    return GroundTruthMap(width_m, height_m, RES, occ)


def fill(gt: GroundTruthMap, x0, y0, x1, y1) -> None:
    ix0, iy0 = int(round(x0 / RES)), int(round(y0 / RES))
    ix1, iy1 = int(round(x1 / RES)), int(round(y1 / RES))
    gt.occupied[iy0:iy1, ix0:ix1] = True


def border(gt: GroundTruthMap) -> None:
    fill(gt, 0, 0, gt.width_m, WALL)
    fill(gt, 0, gt.height_m - WALL, gt.width_m, gt.height_m)
    fill(gt, 0, 0, WALL, gt.height_m)
    fill(gt, gt.width_m - WALL, 0, gt.width_m, gt.height_m)


def museum() -> GroundTruthMap:
    gt = blank(40.0, 12.0)
    border(gt)
    # two rows of display pillars down the hall
    for x0 in (8.0, 16.0, 24.0, 32.0):
        for y0 in (3.5, 8.5):
            fill(gt, x0, y0, x0 + 1.2, y0 + 1.2)
    return gt


def library() -> GroundTruthMap:
    gt = blank(20.0, 12.5)
    border(gt)
    for x0 in (3.0, 8.5, 14.0):
        fill(gt, x0, 2.5, x0 + 2.5, 4.0)
        fill(gt, x0, 8.0, x0 + 2.5, 9.5)
    return gt


def main() -> None:
    out = Path(__file__).resolve().parents[1] / "src" / "tdle" / "maps"
    out.mkdir(parents=True, exist_ok=True)
    save_ground_truth(museum(), out / "museum.map")
    save_ground_truth(library(), out / "library.map")
    print("wrote", out / "museum.map")
    print("wrote", out / "library.map")


if __name__ == "__main__":
    main()
