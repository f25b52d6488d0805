"""Grid convergence of the radial single-tube problem.

A single tube of radius R = 0.01 sits at the center of a radial domain of
unit radius. The tube-wall value is prescribed, the far field follows the
closed-form solution, and the discrete source and bulk field are compared
against it over a refinement sequence. Expect second order in all three
error measures once the mesh resolves the kernel (h <= rho).
"""

import argparse

from mdtube.scenarios import ScenarioConfig, run_single_tube


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", type=int, default=6)
    ap.add_argument("--delta-correction", action="store_true")
    args = ap.parse_args()

    config = ScenarioConfig(kind="single_tube", levels=args.levels,
                            rho_factor=5.0,
                            delta_correction=args.delta_correction)
    report = run_single_tube(config)

    print(f"{'h':>10} {'E_ub':>12} {'E_psi':>12} {'E_q':>12} "
          f"{'order(E_ub)':>12}")
    orders = report.orders("e_ub")
    for i, row in enumerate(report.rows):
        order = f"{orders[i - 1]:12.2f}" if i > 0 else " " * 12
        print(f"{row.h:10.4f} {row.e_ub:12.4e} {row.e_psi:12.4e} "
              f"{row.e_q:12.4e} {order}")


if __name__ == "__main__":
    main()
