#!/usr/bin/env python3
"""L1 errors at T and fitted rates for advection, smooth Burgers and the Burgers shock."""
import argparse

from fvlab.analysis import RefinementFamily, convergence_study, reference_entropy_solution
from fvlab.mesh import BoundaryPolicy
from fvlab.models import Burgers, LinearAdvection
from fvlab.problems import AdvectionTranslate, BurgersSmooth, Sine, Step


def report(title, rep):
    print(title)
    for k, e, d in zip(rep.ks, rep.errors, rep.l1loc):
        print(f"  k={k:.3e}  L1 error={e:.3e}  L1_loc={d:.3e}")
    print(f"  rate={rep.rate:.3f} (residual {rep.fit.residual:.3f}), bounded={rep.bounded}")


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--levels", type=int, default=5)
    p.add_argument("--schemes", default="godunov,grp/2,muscl/2")
    p.add_argument("--jobs", type=int, default=1)
    args = p.parse_args()
    periodic, outflow = BoundaryPolicy("periodic"), BoundaryPolicy("outflow")
    schemes = args.schemes.split(",")

    u0 = Sine(0.0, 1.0)
    fam = RefinementFamily(0.5 / 32, args.levels, 0.5, (0.0, 1.0), LinearAdvection(1.0), u0, 0.5, periodic)
    exact = AdvectionTranslate(u0, 1.0, (0.0, 1.0))
    for s in schemes:
        report(f"advection, {s}", convergence_study(s, fam, lambda x, t: exact(x, t), jobs=args.jobs))

    u0 = Sine(1.0, 0.5)
    fam = RefinementFamily(0.5 / 32, args.levels, 0.5, (0.0, 1.0), Burgers(), u0, 0.25, periodic)
    exact = BurgersSmooth(u0)
    for s in schemes:
        report(f"burgers smooth, {s}", convergence_study(s, fam, lambda x, t: exact(x, t), jobs=args.jobs))

    fam = RefinementFamily(0.5 / 8, args.levels, 0.5, (-0.25, 0.75), Burgers(), Step(1.0, 0.0, 0.0), 0.5, outflow)
    ref = reference_entropy_solution(fam.u0, fam.model, fam.finest, fam.T, outflow, 64)
    for s in schemes:
        report(f"burgers shock, {s}", convergence_study(s, fam, ref, jobs=args.jobs))


if __name__ == "__main__":
    main()
