"""Temporal convergence of fully implicit RK time stepping for Stokes.

Runs the manufactured-solution study at a small desk scale (coarse base
mesh, two refinement levels) for three two-stage schemes and prints the
observed velocity convergence rates under the coupled space-time
refinement rule dt ~ h.  RadauIIA(2) is third order in time, Gauss(2)
shows its stage-order-limited effective rate, LobattoIIIC(2) is second
order.  The full-scale study behind the acceptance suite is the same
code with --n0 8 --lmax 3 (see the README).
"""

from irkmg.bench import (RunConfig, convergence_rates, format_rates_table,
                         run_stokes_mms)


def main():
    for family in ("radauiia", "lobattoiiic", "gauss"):
        rows = []
        for level in (1, 2):
            cfg = RunConfig(problem="stokes-mms", family=family, stages=2,
                            n0=4, level=level)
            print(f"running {family}(2) at level {level} ...", flush=True)
            rows.append(run_stokes_mms(cfg))
        print()
        print(format_rates_table(rows, convergence_rates(rows)))
        print()


if __name__ == "__main__":
    main()
