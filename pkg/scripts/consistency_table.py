#!/usr/bin/env python3
"""Print E(k) and the fitted consistency order for every scheme and data family."""
import argparse

from fvlab.analysis import consistency_study
from fvlab.mesh import BoundaryPolicy, Grid
from fvlab.models import Burgers, IsentropicEuler
from fvlab.problems import Sine, StationaryShock, Step, Sum

PERIODIC = BoundaryPolicy("periodic")
OUTFLOW = BoundaryPolicy("outflow")

ROWS = [
    ("godunov/1", "sine", Sine(1.0, 0.5)),
    ("godunov/1", "sine+step", Sum((Sine(1.0, 0.25), Step(0.5, 0.0, 0.5)))),
    ("godunov/2", "sine+step", Sum((Sine(1.0, 0.25), Step(0.5, 0.0, 0.5)))),
    ("grp/2", "sine+step", Sum((Sine(1.0, 0.25), Step(0.5, 0.0, 0.5)))),
    ("grp/2", "sine", Sine(1.0, 0.5)),
    ("muscl/2", "sine", Sine(1.0, 0.5)),
    ("muscl/2", "sine+step", Sum((Sine(1.0, 0.25), Step(0.5, 0.0, 0.5)))),
]


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--levels", type=int, default=5)
    p.add_argument("--ratio", type=int, default=64, help="oracle refinement ratio")
    p.add_argument("--no-extrapolate", action="store_true", help="use the plain (non-Richardson) oracle")
    p.add_argument("--skip-euler", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    args = p.parse_args()

    cases = [(s, label, prof, Burgers(), Grid(0, 1, 16, 0.5), PERIODIC) for s, label, prof in ROWS]
    if not args.skip_euler:
        euler = IsentropicEuler()
        cases.append(("acoustic/2", "stationary shock", StationaryShock(model=euler), euler,
                      Grid(0, 1, 16, 0.25), OUTFLOW))

    print(f"{'scheme':12s} {'data':18s} {'E(k) per level':60s} result")
    for scheme, label, prof, model, g0, bc in cases:
        rep, _ = consistency_study(scheme, prof, model, g0, args.levels, bc, args.ratio,
                                   extrapolate=not args.no_extrapolate, jobs=args.jobs)
        errs = " ".join(f"{e:.2e}" for e in rep.errors)
        print(f"{scheme:12s} {label:18s} {errs:60s} {rep.summary()}")


if __name__ == "__main__":
    main()
