"""Tour of the implicit Runge-Kutta schemes shipped with the package.

Prints the consistency report for every registered tableau and a small
table of stability-function values illustrating A- versus L-stability:
Gauss schemes keep |R(z)| -> 1 as z -> -inf, Radau and Lobatto damp
stiff components completely.
"""

import numpy as np

from irkmg.tableaux import (registry_keys, stability_function,
                            tableau_lookup, tableau_report)


def main():
    for family, stages in registry_keys():
        tab = tableau_lookup(family, stages)
        print(tableau_report(tab))
        print()

    print("stability function |R(z)| on the negative real axis")
    zs = [-1.0, -10.0, -1e3, -1e6]
    header = "scheme".ljust(24) + "".join(f"z={z:<10.0e}" for z in zs)
    print(header)
    for family, stages in registry_keys():
        tab = tableau_lookup(family, stages)
        vals = "".join(f"{abs(stability_function(tab, z)):<12.3e}"
                       for z in zs)
        print(tab.name.ljust(24) + vals)

    print()
    print("observed order on the Dahlquist problem y' = -y, t in [0, 1]")
    for family, stages in registry_keys():
        tab = tableau_lookup(family, stages)
        errs = []
        for N in (8, 16):
            y = 1.0
            for _ in range(N):
                y *= stability_function(tab, -1.0 / N).real
            errs.append(abs(y - np.exp(-1.0)))
        print(f"{tab.name:<24} observed {np.log2(errs[0] / errs[1]):5.2f}"
              f"  (classical {tab.order})")


if __name__ == "__main__":
    main()
