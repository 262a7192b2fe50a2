"""Write the convergence tables behind the solver experiments.

One CSV per configuration goes to the output folder:

* square_ev35 at lambda 0.26 and 0.5 with both quadrature schemes;
* one spoke per extraordinary vertex set to d in {1, 2, 5, 10};
* valence 6, 7 and 8 meshes with distinct spoke intervals.

    python3 scripts/run_convergence.py [--out results] [--levels 5]
"""

import argparse
from pathlib import Path

from thnus.io_utils import atomic_write, header_line
from thnus.iga import FULL, REDUCED, convergence_study
from thnus.meshes import distinct_spokes, load_builtin, nonuniform_ev35


def configurations():
    for lam in (0.26, 0.5):
        for scheme in (REDUCED, FULL):
            yield f"ev35_lam{lam}_{scheme.kind}", load_builtin("square_ev35"), lam, scheme
    for d in (1, 2, 5, 10):
        yield f"ev35_d{d}", nonuniform_ev35(float(d)), 0.26, REDUCED
    for n in (6, 7, 8):
        yield f"v{n}_distinct", distinct_spokes(load_builtin(f"square_v{n}")), 0.26, REDUCED


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="results")
    p.add_argument("--levels", type=int, default=5)
    args = p.parse_args(argv)
    out = Path(args.out)
    for name, mesh, lam, scheme in configurations():
        rep = convergence_study(mesh, lam, args.levels, scheme)
        atomic_write(out / f"{name}.csv", rep.csv(header_line(lam, 0, study=name, quadrature=scheme.kind)))
        print(f"{name}: slope L2 {rep.slope('err_l2'):.3f}, H1 {rep.slope('err_h1'):.3f}")


if __name__ == "__main__":
    main()
