#!/usr/bin/env python3
"""Balance-law residuals of Burgers Riemann runs on grid-aligned rectangles."""
import argparse

from fvlab.analysis import aligned_rectangles, balance_study
from fvlab.flux import SchemeId
from fvlab.mesh import BoundaryPolicy, Grid
from fvlab.models import Burgers
from fvlab.problems import Step
from fvlab.scheme import run


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--levels", type=int, default=8)
    p.add_argument("--rectangles", type=int, default=10)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--rule", choices=("midpoint", "gauss"), default="midpoint")
    p.add_argument("--schemes", default="godunov,grp/2")
    args = p.parse_args()
    model, bc = Burgers(), BoundaryPolicy("outflow")
    g0 = Grid(-0.5, 1.5, 16, 0.5)
    rects = aligned_rectangles(g0, 1.0, args.rectangles, seed=args.seed)
    for name in args.schemes.split(","):
        scheme = SchemeId.parse(name)
        trajs = [run(Step(1.0, 0.0, 0.0), scheme, g0.refine(2 ** m), model, 1.0, bc)
                 for m in range(args.levels)]
        study = balance_study(trajs, rects, model, rule=args.rule)
        print(scheme)
        for k, w in zip(study.ks, study.worst):
            print(f"  k={k:.3e}  worst residual={w:.3e}")
        print(f"  exponent={study.fit.exponent:.3f}, finest/coarsest={study.finest_over_coarsest:.2e}")


if __name__ == "__main__":
    main()
