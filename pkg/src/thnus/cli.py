"""Command-line front end.

Exit codes: 0 success, 1 failed certificate or property check, 2 usage or
input error.  Reports go to ``--out`` (written atomically) or to stdout and
always start with a header line naming the version, lambda and seed.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__, check_lambda

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _lambda(text):
    try:
        return check_lambda(float(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _grid(text):
    """``start:stop:step`` (inclusive stop) or a comma list of lambda values."""
    import numpy as np

    try:
        if ":" in text:
            a, b, s = (float(x) for x in text.split(":"))
            vals = np.round(np.arange(a, b + 0.5 * s, s), 12)
        else:
            vals = [float(x) for x in text.split(",")]
        return [check_lambda(v) for v in vals]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _load(name):
    from .mesh import load_mesh
    from .meshes import BUILTIN, load_builtin

    if os.path.exists(name):
        return load_mesh(name)
    stem = os.path.basename(name)
    stem = stem[:-5] if stem.endswith(".mesh") else stem
    if stem in BUILTIN:
        return load_builtin(stem)
    raise UsageError(f"mesh file {name!r} not found (bundled meshes: {', '.join(BUILTIN)})")


def _emit(args, text):
    from .io_utils import atomic_write

    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


def _header(args, lam, **extra):
    from .io_utils import header_line

    return header_line(lam, args.seed, command=args.command, threads=args.threads, **extra)


# --------------------------------------------------------------------------
# subcommands


def cmd_validate(args):
    from .mesh import classify_faces, to_hybrid_topology

    m = _load(args.mesh)
    conn = m.connectivity
    h = to_hybrid_topology(m)
    kinds = classify_faces(h)
    lines = [f"# {_header(args, args.lam)}", "quantity,value",
             f"vertices,{len(m.vertices)}", f"faces,{len(m.faces)}"]
    for v in m.extraordinary_vertices():
        lines.append(f"extraordinary_vertex_{v},{conn.valence(v)}")
    lines += [f"hybrid_vertices,{len(h.vertices)}", f"hybrid_faces,{len(h.faces)}"]
    for k in ("polygon", "zero", "irregular", "regular"):
        lines.append(f"{k}_faces,{kinds.count(k)}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _hybrid_at(args):
    from .mesh import to_hybrid_topology
    from .subdivision import refine_geometry

    h = to_hybrid_topology(_load(args.mesh))
    for _ in range(args.levels - 1):
        h = refine_geometry(h, args.lam)
    return h


def cmd_subdivide(args):
    from .mesh import format_hybrid

    h = _hybrid_at(args)
    _emit(args, format_hybrid(h, _header(args, args.lam, levels=args.levels)))
    return EXIT_OK


def cmd_export_obj(args):
    from .subdivision import format_obj, tessellate_limit

    h = _hybrid_at(args)
    pts, tris = tessellate_limit(h, args.lam, args.samples)
    _emit(args, format_obj(pts, tris, _header(args, args.lam, levels=args.levels, samples=args.samples)))
    return EXIT_OK


def cmd_check_spectrum(args):
    from .spectral import certificates_csv, spectrum_sweep

    certs = spectrum_sweep(args.valence, args.lam_list, args.draws, args.seed)
    lam = ",".join(f"{x:.6g}" for x in args.lam_list)
    text = certificates_csv(certs, args.seed, _header(args, lam, draws=args.draws))
    ok = all(c.passed for c in certs)
    _emit(args, text + f"# summary passed={int(ok)} samples={len(certs)} "
                       f"min_margin={min(c.margin for c in certs):.6e}\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_check_charmap(args):
    import numpy as np

    from .charmap import certify_injectivity, plot_coefficients, verify_scaling
    from .spectral import random_intervals

    rng = np.random.default_rng(args.seed)
    draws = {n: [random_intervals(rng, n) for _ in range(args.draws)] for n in args.valence}
    grid = ",".join(f"{x:.6g}" for x in args.grid)
    lines = [f"# {_header(args, grid, draws=args.draws)}",
             "n,lambda,s_min_pv,s_max_w,t_min_pw,t_max_v,cone_margin,scaling_residual,pass"]
    ok = True
    for n in args.valence:
        for lam in args.grid:
            cert = certify_injectivity([n], [lam], draws[n])
            scale = max(verify_scaling(n, lam, d) for d in draws[n])
            passed = cert.passed and scale <= 1e-12
            ok &= passed
            lines.append(f"{n},{lam:.6g},{cert.s_min_pv:.6e},{cert.s_max_w:.6e},{cert.t_min_pw:.6e},"
                         f"{cert.t_max_v:.6e},{cert.cone_margin:.6e},{scale:.3e},{int(passed)}")
    lines.append(f"# summary passed={int(ok)}")
    _emit(args, "\n".join(lines) + "\n")
    if args.plot_dir:
        lams = np.round(np.linspace(0.26, 0.99, 74), 12)
        for which in args.plot:
            from .charmap import S_INDICES, T_INDICES
            idx = S_INDICES if which == "S" else T_INDICES
            plot_coefficients(which, idx, lams, args.plot_dir, _header(args, "0.26..0.99"))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_basis_test(args):
    from .basis import element_space, partition_of_unity, refinement_residuals
    from .mesh import to_hybrid_topology

    h = to_hybrid_topology(_load(args.mesh))
    space = element_space(h, args.lam)
    pou, low = partition_of_unity(space, args.points, args.seed)
    refi, inv = refinement_residuals(h, args.lam, max(1, args.points // 5), args.seed)
    rows = [("partition_of_unity", pou, 1e-10, pou <= 1e-10),
            ("min_value", low, -1e-12, low >= -1e-12),
            ("refinability", refi, 1e-10, refi <= 1e-10),
            ("invariance", inv, 1e-9, inv <= 1e-9)]
    lines = [f"# {_header(args, args.lam, points=args.points)}", "property,value,tolerance,pass"]
    lines += [f"{name},{val:.6e},{tol:.0e},{int(ok)}" for name, val, tol, ok in rows]
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if all(r[3] for r in rows) else EXIT_FAIL


def _scheme(args):
    from .iga import QuadratureScheme

    return QuadratureScheme(args.quadrature, args.depth)


def cmd_solve_poisson(args):
    from .iga import SOLUTIONS, PoissonProblem, error_norms, solve_poisson

    h = _hybrid_at(args)
    prob = PoissonProblem(h, args.lam, SOLUTIONS[args.solution], _scheme(args))
    sol = solve_poisson(prob)
    l2, h1 = error_norms(prob, sol)
    lines = [f"# {_header(args, args.lam, quadrature=args.quadrature, solution=args.solution)}",
             "level,ndof,err_l2,err_h1", f"{args.levels},{sol.ndof},{l2:.10e},{h1:.10e}"]
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_convergence_study(args):
    from .iga import SOLUTIONS, convergence_study

    rep = convergence_study(_load(args.mesh), args.lam, args.levels, _scheme(args), SOLUTIONS[args.solution])
    text = rep.csv(_header(args, args.lam, quadrature=args.quadrature, solution=args.solution))
    _emit(args, text)
    if args.plot:
        _plot_convergence(rep, args.plot, _header(args, args.lam, quadrature=args.quadrature))
    return EXIT_OK


def _plot_convergence(rep, path, header):
    import io

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from .io_utils import atomic_write

    plt.rcParams["svg.hashsalt"] = "thnus"
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(rep.h, rep.err_l2, "o-", label=f"L2 (slope {rep.slope('err_l2'):.2f})")
    ax.loglog(rep.h, rep.err_h1, "s-", label=f"H1 (slope {rep.slope('err_h1'):.2f})")
    ax.set_xlabel("h")
    ax.set_ylabel("error")
    ax.set_title(header, fontsize=6)
    ax.legend()
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    atomic_write(path, buf.getvalue())


# --------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="thnus", description="Hybrid-mesh subdivision, certification and isogeometric analysis tools.")
    p.add_argument("--version", action="version", version=f"thnus {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, mesh=True, lam=True):
        if mesh:
            sp.add_argument("--mesh", required=True, help="mesh file or bundled mesh name")
        if lam:
            sp.add_argument("--lambda", dest="lam", type=_lambda, default=0.26, help="tuning factor in (1/4, 1)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=_positive_int, default=1, help="BLAS threads (recorded in the header)")
        sp.add_argument("--out", help="output file (default: stdout)")

    sp = sub.add_parser("validate", help="parse and convert a mesh")
    common(sp)

    for name, helptext in (("subdivide", "write the refined hybrid mesh"),
                           ("export-obj", "triangulate the limit surface")):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        sp.add_argument("--levels", type=_positive_int, default=1, help="hybrid level (1 = converted mesh)")
        if name == "export-obj":
            sp.add_argument("--samples", type=int, default=4, help="samples per element side")

    sp = sub.add_parser("check-spectrum", help="certify the subdivision-matrix eigenvalues")
    common(sp, mesh=False, lam=False)
    sp.add_argument("--valence", type=int, nargs="+", default=[3, 5, 6, 7, 8])
    sp.add_argument("--lambda", dest="lam_list", type=_grid, default=[0.26],
                    help="value, comma list or start:stop:step")
    sp.add_argument("--draws", type=_positive_int, default=100)

    sp = sub.add_parser("check-charmap", help="certify the characteristic-map sign conditions")
    common(sp, mesh=False, lam=False)
    sp.add_argument("--valence", type=int, nargs="+", default=[3, 4, 5, 6, 7, 8])
    sp.add_argument("--lambda", dest="grid", type=_grid, default=[0.26],
                    help="value, comma list or start:stop:step")
    sp.add_argument("--draws", type=_positive_int, default=20)
    sp.add_argument("--plot-dir", help="write coefficient plots and tables here")
    sp.add_argument("--plot", nargs="+", choices=["S", "T"], default=["S", "T"])

    sp = sub.add_parser("basis-test", help="partition of unity, refinability and invariance")
    common(sp)
    sp.add_argument("--points", type=_positive_int, default=1000, help="random points per element")

    for name, helptext in (("solve-poisson", "solve on one level"),
                           ("convergence-study", "solve on levels 1..L and fit rates")):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        sp.add_argument("--levels", type=_positive_int, default=5 if name == "convergence-study" else 1)
        sp.add_argument("--quadrature", choices=["reduced", "full"], default="reduced")
        sp.add_argument("--depth", type=_positive_int, default=10)
        sp.add_argument("--solution", choices=["sinsin", "x", "x+2y"], default="sinsin")
        if name == "convergence-study":
            sp.add_argument("--plot", help="optional SVG log-log plot")
    return p


COMMANDS = {
    "validate": cmd_validate, "subdivide": cmd_subdivide, "export-obj": cmd_export_obj,
    "check-spectrum": cmd_check_spectrum, "check-charmap": cmd_check_charmap,
    "basis-test": cmd_basis_test, "solve-poisson": cmd_solve_poisson,
    "convergence-study": cmd_convergence_study,
}


def run(argv=None):
    """Run one subcommand and return its exit code."""
    argv = sys.argv[1:] if argv is None else list(argv)
    # thread limits must be in the environment before numpy loads
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--threads", default="1")
    known, _ = pre.parse_known_args(argv)
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, str(known.threads))
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "convergence-study" and args.levels < 3:
        print("thnus: error: convergence-study needs at least 3 levels", file=sys.stderr)
        return EXIT_USAGE
    from .mesh import MeshError

    try:
        return COMMANDS[args.command](args)
    except (UsageError, MeshError, OSError) as exc:
        print(f"thnus: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
