"""Command-line front end: JSON problem files in, tables and grids out.

Subcommands: eigs | solvability | solve | green | spectrum | norms.  Exit
codes are a stable contract: 0 ok, 2 spec parse error, 3 unsupported
coefficient regime, 4 solvability blocked, 5 linear solver failure.

The problem file is JSON with sections geometry, pencil, solver, boundary,
weights, output; unknown sections or keys are rejected.  Right-hand sides
and boundary data are written in a small expression language over r and phi
with sin, cos, exp and bump(r, r0, r1).  All floats are printed with repr
(shortest round-trip form) so identical inputs give byte-identical output.
"""

import argparse
import ast
import json
import os
import sys

import numpy as np

from .core import GridFunction, PlaneAngleError, SectorGrid, make_geometry
from .difference_ops import (
    SingularMatrix,
    apply_on_grid,
    inverse_matrix,
    spectrum,
    symmetric_part_positive_definite,
    to_matrix,
    two_sector_operator,
)
from .green_check import (
    GreenConfig,
    bump_trig_pair,
    green_residual_dirichlet,
    green_residual_neumann,
    term_magnitudes,
)
from .pencil import (
    PoissonPencilProblem,
    UnsupportedRegime,
    eigenvalues_closed_form,
    eigenvalues_numeric,
    solvability_report,
)
from .sector_solver import (
    DDProblem,
    NonlocalPoissonProblem,
    SingularSystem,
    SolverFailure,
    solve_dd,
    solve_nonlocal_poisson,
)
from .weighted_norms import WeightParams, e_norm, h_norm, trace_ratio

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_REGIME = 3
EXIT_BLOCKED = 4
EXIT_SOLVER = 5


class SpecError(PlaneAngleError):
    pass


# ---------------------------------------------------------------------------
# expression mini-language


def _bump_builtin(r, r0, r1):
    """C-infinity bump supported on (r0, r1), peak value 1/e at the middle."""
    r = np.asarray(r, float)
    t = (2.0 * r - r0 - r1) / (r1 - r0)
    out = np.zeros_like(t)
    m = np.abs(t) < 1.0
    out[m] = np.exp(-1.0 / (1.0 - t[m] ** 2))
    return out


_EXPR_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "bump": _bump_builtin}
_EXPR_NAMES = {"pi": np.pi}
_EXPR_OPS = (
    ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd, ast.Mod,
)


def compile_expression(text):
    """Compile an arithmetic expression in r, phi to a numpy callable.

    Allowed: numbers, r, phi, pi, + - * / % **, and the functions sin, cos,
    exp, bump(r, r0, r1).  Anything else raises SpecError.
    """
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise SpecError("bad expression %r: %s" % (text, exc))
    func_names = {
        id(n.func) for n in ast.walk(tree) if isinstance(n, ast.Call)
    }
    for node in ast.walk(tree):
        if isinstance(node, (ast.Expression, ast.Load)):
            continue
        if isinstance(node, (ast.BinOp, ast.UnaryOp)):
            if not isinstance(node.op, _EXPR_OPS):
                raise SpecError("operator not allowed in %r" % text)
            continue
        if isinstance(node, _EXPR_OPS):
            continue
        if isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float)):
                raise SpecError("non-numeric constant in %r" % text)
            continue
        if isinstance(node, ast.Name):
            if id(node) in func_names and node.id in _EXPR_FUNCS:
                continue
            if node.id not in ("r", "phi") and node.id not in _EXPR_NAMES:
                raise SpecError("unknown name %r in %r" % (node.id, text))
            continue
        if isinstance(node, ast.Call):
            if not (isinstance(node.func, ast.Name) and node.func.id in _EXPR_FUNCS):
                raise SpecError("unknown function call in %r" % text)
            if node.keywords:
                raise SpecError("keyword arguments not allowed in %r" % text)
            continue
        raise SpecError("construct %s not allowed in %r" % (type(node).__name__, text))
    code = compile(tree, "<expression>", "eval")

    def func(r, phi):
        env = dict(_EXPR_FUNCS)
        env.update(_EXPR_NAMES)
        env["r"] = r
        env["phi"] = phi
        return eval(code, {"__builtins__": {}}, env)

    return func


# ---------------------------------------------------------------------------
# problem files

_SCHEMA = {
    "geometry": {"angles"},
    "pencil": {"alpha", "beta"},
    "solver": {"r_min", "r_max", "n_r", "n_phi", "rhs"},
    "boundary": {"g1", "g3"},
    "weights": {"a", "l"},
    "output": {"format", "path"},
}


def load_spec(path):
    try:
        with open(path) as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError("cannot read problem file %s: %s" % (path, exc))
    if not isinstance(doc, dict):
        raise SpecError("problem file must be a JSON object")
    for section, body in doc.items():
        if section not in _SCHEMA:
            raise SpecError("unknown section %r" % section)
        if not isinstance(body, dict):
            raise SpecError("section %r must be an object" % section)
        extra = set(body) - _SCHEMA[section]
        if extra:
            raise SpecError("unknown keys %s in section %r" % (sorted(extra), section))
    return doc


def _require(spec, *sections):
    missing = [s for s in sections if s not in spec]
    if missing:
        raise SpecError("missing required sections: %s" % ", ".join(missing))
    for s in sections:
        gaps = _SCHEMA[s] - set(spec[s])
        if gaps and s != "solver":
            raise SpecError("section %r missing keys %s" % (s, sorted(gaps)))


def _geometry(spec):
    return make_geometry(spec["geometry"]["angles"])


def _pencil_problem(spec):
    geo = _geometry(spec)
    pen = spec["pencil"]
    return PoissonPencilProblem(
        float(pen["alpha"]), float(pen["beta"]), geo.angles[0], geo.angles[-1]
    )


def _grid(spec, factor=1):
    geo = _geometry(spec)
    sol = spec["solver"]
    return SectorGrid(
        geo,
        float(sol["r_min"]),
        float(sol["r_max"]),
        int(sol["n_r"]) * factor,
        int(sol["n_phi"]) * factor,
    )


def _out_path(spec, args, default_name):
    out_dir = args.out if args.out else "."
    name = default_name
    if "output" in spec and spec["output"].get("path"):
        name = spec["output"]["path"]
    return os.path.join(out_dir, name)


def _f(x):
    """Shortest round-trip decimal form of a float-like value.

    Adding 0.0 folds negative zero into plain zero so outputs stay stable.
    """
    return repr(float(x) + 0.0)


def _say(args, text):
    if not args.quiet:
        print(text)


def _write_eig_csv(path, rows):
    with open(path, "w") as f:
        f.write("method,re,im\n")
        for method, z in rows:
            f.write("%s,%s,%s\n" % (method, repr(float(z.real)), repr(float(z.imag))))


def _write_grid_csv(path, u):
    r, phi = u.grid.meshgrid()
    with open(path, "w") as f:
        f.write("r,phi,re,im\n")
        for rr, pp, vv in zip(r.ravel(), phi.ravel(), u.values.ravel()):
            f.write(
                "%s,%s,%s,%s\n"
                % (_f(rr), _f(pp), _f(vv.real), _f(vv.imag))
            )


def _read_grid_csv(path, grid):
    data = np.genfromtxt(path, delimiter=",", names=True)
    expected = (grid.n_r + 1) * (grid.n_phi + 1)
    if data.shape != (expected,):
        raise SpecError(
            "grid file has %d rows, the declared grid needs %d" % (data.size, expected)
        )
    vals = (data["re"] + 1j * data["im"]).reshape(grid.n_r + 1, grid.n_phi + 1)
    return GridFunction(grid, vals)


# ---------------------------------------------------------------------------
# manufactured problems (built-in "rhs": "manufactured")


def _sin4_bump(r_min, r_max):
    a0 = r_min + 0.08 * (r_max - r_min)
    a1 = r_max - 0.08 * (r_max - r_min)
    k = np.pi / (a1 - a0)

    def eta(r):
        r = np.asarray(r, float)
        out = np.zeros_like(r)
        m = (r > a0) & (r < a1)
        out[m] = np.sin(k * (r[m] - a0)) ** 4
        return out

    def deta(r):
        r = np.asarray(r, float)
        out = np.zeros_like(r)
        m = (r > a0) & (r < a1)
        s, c = np.sin(k * (r[m] - a0)), np.cos(k * (r[m] - a0))
        out[m] = 4.0 * k * s**3 * c
        return out

    def ddeta(r):
        r = np.asarray(r, float)
        out = np.zeros_like(r)
        m = (r > a0) & (r < a1)
        s, c = np.sin(k * (r[m] - a0)), np.cos(k * (r[m] - a0))
        out[m] = 4.0 * k**2 * (3.0 * s**2 * c**2 - s**4)
        return out

    return eta, deta, ddeta


def manufactured_dd(geometry, r_min, r_max):
    """Exact solution and data for the differential-difference problem.

    w* = eta(r) * sin(kappa*(phi-b1))**3 vanishes with two derivatives at
    both rays, so the difference-operator image of the data stays smooth
    across the middle ray and second-order convergence is observable.
    """
    b1 = geometry.angles[0]
    kappa = np.pi / geometry.opening
    eta, deta, ddeta = _sin4_bump(r_min, r_max)

    def w(r, phi):
        return eta(r) * np.sin(kappa * (phi - b1)) ** 3

    def pde_of_w(r, phi):
        s = np.sin(kappa * (phi - b1))
        c = np.cos(kappa * (phi - b1))
        ang = s**3
        ddang = 3.0 * kappa**2 * (2.0 * s * c**2 - s**3)
        lap = ddeta(r) * ang + deta(r) * ang / r + eta(r) * ddang / r**2
        return -lap + eta(r) * ang

    return w, pde_of_w


def manufactured_nonlocal(geometry, r_min, r_max):
    """Exact solution u* = r^2 cos(phi) eta(r) and its data."""
    eta, deta, ddeta = _sin4_bump(r_min, r_max)

    def u(r, phi):
        return r**2 * np.cos(phi) * eta(r)

    def f(r, phi):
        g = r**2 * eta(r)
        dg = 2.0 * r * eta(r) + r**2 * deta(r)
        ddg = 2.0 * eta(r) + 4.0 * r * deta(r) + r**2 * ddeta(r)
        return (-(ddg + dg / r - g / r**2) + g) * np.cos(phi)

    return u, f


# ---------------------------------------------------------------------------
# subcommands


def cmd_eigs(spec, args):
    _require(spec, "geometry", "pencil")
    p = _pencil_problem(spec)
    strip = (args.im_min, args.im_max)
    closed = eigenvalues_closed_form(p, strip)
    window = (-0.5, 0.5, args.im_min, args.im_max)
    numeric = eigenvalues_numeric(p, window)
    rows = [("closed_form", z) for z in closed.values]
    rows += [("numeric", z) for z in numeric.values]
    path = _out_path(spec, args, "eigenvalues.csv")
    _write_eig_csv(path, rows)
    _say(args, "%d closed-form and %d numeric eigenvalues -> %s"
         % (len(closed.values), len(numeric.values), path))
    return EXIT_OK


def cmd_solvability(spec, args):
    _require(spec, "geometry", "pencil")
    p = _pencil_problem(spec)
    report = solvability_report(p, args.a, args.l)
    _say(args, "pencil line Im lambda = %s" % _f(report.line))
    _say(args, "nearest eigenvalue %s at distance %s"
         % (repr(complex(report.certificate.nearest_eigenvalue)), _f(report.certificate.distance)))
    _say(args, "SOLVABLE" if report.solvable else "BLOCKED")
    return EXIT_OK if report.solvable else EXIT_BLOCKED


def _solve_once(spec, args, factor=1):
    geo = _geometry(spec)
    pen = spec["pencil"]
    alpha, beta = float(pen["alpha"]), float(pen["beta"])
    sol = spec["solver"]
    r_min, r_max = float(sol["r_min"]), float(sol["r_max"])
    grid = _grid(spec, factor)
    manufactured = sol.get("rhs", "0") == "manufactured"

    if args.problem == "dd":
        if manufactured:
            w_exact, pde = manufactured_dd(geo, r_min, r_max)
            op = two_sector_operator(alpha, beta, geo)
            rhs = apply_on_grid(op, GridFunction.from_callable(grid, pde))
            exact = GridFunction.from_callable(grid, w_exact)
        else:
            rhs_func = compile_expression(sol.get("rhs", "0"))
            rhs = GridFunction.from_callable(grid, rhs_func)
            exact = None
        problem = DDProblem(alpha, beta, geo, rhs, r_min, r_max)
        result = solve_dd(problem, grid)
        warn = False
    else:
        if manufactured:
            u_exact, f_func = manufactured_nonlocal(geo, r_min, r_max)
            rhs = GridFunction.from_callable(grid, f_func)
            b1, b2, b3 = geo.angles
            g1 = lambda r: u_exact(r, b1) + alpha * u_exact(r, b2)
            g3 = lambda r: u_exact(r, b3) + beta * u_exact(r, b2)
            exact = GridFunction.from_callable(grid, u_exact)
        else:
            rhs_func = compile_expression(sol.get("rhs", "0"))
            rhs = GridFunction.from_callable(grid, rhs_func)
            bnd = spec.get("boundary", {"g1": "0", "g3": "0"})
            g1_func = compile_expression(bnd.get("g1", "0"))
            g3_func = compile_expression(bnd.get("g3", "0"))
            b1, b3 = geo.angles[0], geo.angles[-1]
            g1 = lambda r: g1_func(r, b1 * np.ones_like(r))
            g3 = lambda r: g3_func(r, b3 * np.ones_like(r))
            exact = None
        problem = NonlocalPoissonProblem(alpha, beta, geo, rhs, g1, g3, r_min, r_max)
        warn = not problem.guaranteed_solvable
        result = solve_nonlocal_poisson(problem, grid)

    err = None
    if exact is not None:
        r, _ = grid.meshgrid()
        diff = result.solution.values - exact.values
        err = float(np.sqrt(np.sum(r * grid.dr * grid.dphi * np.abs(diff) ** 2)))
    return grid, result, err, warn


def cmd_solve(spec, args):
    _require(spec, "geometry", "pencil", "solver")
    refinements = max(0, args.refine)
    errors = []
    warn = False
    for level in range(refinements + 1):
        grid, result, err, warn = _solve_once(spec, args, factor=2**level)
        if err is not None:
            errors.append(err)
    orders = [
        float(np.log2(errors[i] / errors[i + 1]))
        for i in range(len(errors) - 1)
        if errors[i + 1] > 0.0
    ]

    grid_path = _out_path(spec, args, "solution.csv")
    _write_grid_csv(grid_path, result.solution)
    summary = {
        "problem": args.problem,
        "equation_residual": result.equation_residual,
        "boundary_residual": result.boundary_residual,
        "n_unknowns": result.n_unknowns,
    }
    if warn:
        summary["regime_warning"] = "|alpha+beta| >= 2: solvability not guaranteed"
    if errors:
        summary["manufactured_errors"] = errors
        summary["observed_orders"] = orders
    out_dir = args.out if args.out else "."
    summary_path = os.path.join(out_dir, "summary.json")
    with open(summary_path, "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    _say(args, "solution -> %s" % grid_path)
    _say(args, "summary -> %s" % summary_path)
    if orders:
        _say(args, "observed orders: %s" % ", ".join(_f(o) for o in orders))
    return EXIT_OK


def cmd_green(spec, args):
    _require(spec, "geometry", "pencil")
    geo = _geometry(spec)
    b1, b2, _ = geo.angles
    cfg = GreenConfig(
        geo,
        float(spec["pencil"]["alpha"]),
        args.chi12,
        b2 - b1,
        order=args.order,
    )
    pair = bump_trig_pair()
    if args.example == 1:
        residual = green_residual_dirichlet(cfg, pair)
        terms = term_magnitudes(cfg, pair, neumann=False)
    else:
        residual = green_residual_neumann(cfg, pair)
        terms = term_magnitudes(cfg, pair, neumann=True)
    _say(args, "identity residual: %s" % _f(residual))
    for i, t in enumerate(terms):
        _say(args, "  |term %d| = %s" % (i, _f(t)))
    ok = residual < 1e-6 * max(terms)
    _say(args, "PASS" if ok else "FAIL")
    return EXIT_OK if ok else 1


def cmd_spectrum(spec, args):
    _require(spec, "geometry", "pencil")
    geo = _geometry(spec)
    op = two_sector_operator(
        float(spec["pencil"]["alpha"]), float(spec["pencil"]["beta"]), geo
    )
    m = to_matrix(op)
    _say(args, "shift matrix:")
    for row in m:
        _say(args, "  [%s]" % ", ".join(_f(x) for x in row))
    _say(args, "eigenvalues: %s" % ", ".join(repr(complex(z)) for z in spectrum(op)))
    _say(args, "det: %s" % _f(np.linalg.det(m)))
    try:
        inv = inverse_matrix(op)
        _say(args, "inverse:")
        for row in inv:
            _say(args, "  [%s]" % ", ".join(_f(x) for x in row))
    except SingularMatrix:
        _say(args, "inverse: SINGULAR")
    pd = symmetric_part_positive_definite(op)
    _say(args, "symmetric part positive definite: %s" % ("yes" if pd else "no"))
    return EXIT_OK


def cmd_norms(spec, args):
    _require(spec, "geometry", "solver", "weights")
    grid = _grid(spec)
    if args.input:
        u = _read_grid_csv(args.input, grid)
    else:
        rhs_func = compile_expression(spec["solver"].get("rhs", "0"))
        u = GridFunction.from_callable(grid, rhs_func)
    w = spec["weights"]
    p = WeightParams(float(w["a"]), int(w["l"]))
    _say(args, "e_norm: %s" % _f(e_norm(u, p)))
    _say(args, "h_norm: %s" % _f(h_norm(u, p)))
    if p.l >= 1:
        _say(args, "trace ratio gamma1: %s" % _f(trace_ratio(u, "gamma1", p)))
        _say(args, "trace ratio gamma3: %s" % _f(trace_ratio(u, "gamma3", p)))
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    ap = argparse.ArgumentParser(
        prog="planeangle",
        description="Nonlocal Poisson problems in plane angles: pencil "
        "eigenvalues, solvability certificates, sector solves, Green "
        "identity checks, weighted norms.",
    )
    ap.add_argument("--spec", required=True, help="JSON problem file")
    ap.add_argument("--out", default=None, help="output directory")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--quiet", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p_eigs = sub.add_parser("eigs", help="pencil eigenvalue table")
    p_eigs.add_argument("--im-min", type=float, default=-4.0)
    p_eigs.add_argument("--im-max", type=float, default=4.0)

    p_solv = sub.add_parser("solvability", help="weighted-scale certificate")
    p_solv.add_argument("--a", type=float, required=True)
    p_solv.add_argument("--l", type=float, required=True)

    p_solve = sub.add_parser("solve", help="sector boundary value solve")
    p_solve.add_argument("--problem", choices=("dd", "nonlocal"), default="nonlocal")
    p_solve.add_argument("--refine", type=int, default=0)

    p_green = sub.add_parser("green", help="Green identity residual")
    p_green.add_argument("--example", type=int, choices=(1, 2), default=1)
    p_green.add_argument("--chi12", type=float, default=1.0)
    p_green.add_argument("--order", type=int, default=12)

    sub.add_parser("spectrum", help="shift matrix report")

    p_norms = sub.add_parser("norms", help="weighted norms of a grid function")
    p_norms.add_argument("--input", default=None, help="grid CSV file")

    return ap


_COMMANDS = {
    "eigs": cmd_eigs,
    "solvability": cmd_solvability,
    "solve": cmd_solve,
    "green": cmd_green,
    "spectrum": cmd_spectrum,
    "norms": cmd_norms,
}


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else 0
    try:
        spec = load_spec(args.spec)
        return _COMMANDS[args.command](spec, args)
    except SpecError as exc:
        print("problem file error: %s" % exc, file=sys.stderr)
        return EXIT_PARSE
    except UnsupportedRegime as exc:
        print("unsupported regime: %s" % exc, file=sys.stderr)
        return EXIT_REGIME
    except (SingularSystem, SolverFailure, SingularMatrix) as exc:
        print("solver failure: %s" % exc, file=sys.stderr)
        return EXIT_SOLVER
    except PlaneAngleError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
