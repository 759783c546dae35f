#!/usr/bin/env python3
"""Sweep the exit-0 probability of the reference mass over a grid of the two
independent phase errors of a 3-path sorter and write it as CSV."""

import sys

import numpy as np

from interfsort import sweep_leakage
from interfsort.leakage import write_sweep_csv


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "p00_grid.csv"
    edge = 2 * np.pi / 15
    grid_pts = np.linspace(-edge, edge, 101)
    grid = sweep_leakage(grid_pts, grid_pts, (1.0, 7 / 6, 8 / 6))
    write_sweep_csv(out, grid_pts, grid_pts, grid)
    p00 = grid[..., 0, 0]
    diag = np.diagonal(p00)
    print(f"wrote {out} ({p00.size} points)")
    print(f"p00 range over the full square: [{p00.min():.4f}, {p00.max():.4f}]")
    print(f"p00 range on the equal-error diagonal: [{diag.min():.4f}, {diag.max():.4f}]")


if __name__ == "__main__":
    main()
