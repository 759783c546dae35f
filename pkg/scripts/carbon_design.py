#!/usr/bin/env python3
"""Solve the two-isotope carbon sorter at several velocities and print the
resulting path differences, phases and coupler geometry."""

import numpy as np

from interfsort import (
    Species,
    de_broglie_wavelength,
    mmi_length,
    solve_n_path,
    solve_two_species,
    verify_design,
)

M_C12 = 1.99e-26
M_C14 = M_C12 * 7.0 / 6.0


def main():
    for velocity in (100.0, 10.0, 1.0):
        sol = solve_two_species(M_C12, M_C14, velocity, max_k=100)
        lam = de_broglie_wavelength(M_C12, velocity)
        print(f"v = {velocity:6.1f} m/s: k1 = {sol.k1}, k2 = {sol.k2}, "
              f"dL = {sol.delta_length:.4e} m (= {sol.delta_length / lam:.1f} lambda_0)")

    design = solve_n_path([Species("C12", M_C12), Species("C14", M_C14)], 1.0)
    residual = float(np.abs(verify_design(design)).max())
    print(f"\nN-path solver agrees: dL_1 = {design.delta_lengths[1]:.4e} m, "
          f"max residual {residual:.2e} rad")

    lam = de_broglie_wavelength(M_C12, 1.0)
    print(f"5-port coupler at W = 1 um, v = 1 m/s: "
          f"length = {mmi_length(1e-6, lam, 5) * 1e6:.2f} um")


if __name__ == "__main__":
    main()
