"""Command-line front end.

Every subcommand builds an envelope ``{command, inputs, results, provenance}``
and writes it as JSON, CSV or a plain-text table.  Tabular results live in
``results["rows"]``; CSV output contains only those rows when present,
otherwise one ``key,value`` line per scalar result.

Exit codes: 0 success, 1 domain or usage error, 2 numerical failure
(non-convergence, grid too coarse, inconsistent solve, missing root).
"""

import argparse
import io
import json
import math
import sys

import numpy as np

from . import jump_solver as js
from .bose_moments import REFERENCE_CONSTANTS, REFERENCE_KAPITSA, REFERENCE_KAPITSA_PI2, REFERENCE_ONE_MINUS_G
from .dispersion import LAMBDA0, LAMBDA1, default_dispersion
from .errors import BoseJumpError, DomainError, InvalidParams, OnCut
from .factorization import default_factorization
from .oracle import compare_with_analytic, solve_halfspace

EXIT_DOMAIN = 1
EXIT_NUMERICAL = 2


class UsageError(DomainError):
    """Invalid command-line usage."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_DOMAIN, f"{self.prog}: error: {message}\n")


# -- serialization ------------------------------------------------------------


def _fmt_float(x):
    return f"{x + 0.0:#.17g}"


def _clean(value):
    """Convert numpy scalars and complex numbers into plain JSON-able values."""
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, (np.floating, float)):
        return float(value)
    return value


def _emit_json(value, indent=0):
    pad = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_emit_json(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        items = [f"{pad}{_emit_json(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return json.dumps(value)
    if isinstance(value, float):
        return _fmt_float(value) if math.isfinite(value) else "null"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def to_json(envelope):
    return _emit_json(_clean(envelope)) + "\n"


def _flatten(row):
    out = {}
    for key, value in row.items():
        if isinstance(value, dict) and set(value) == {"re", "im"}:
            out[f"{key}_re"], out[f"{key}_im"] = value["re"], value["im"]
        else:
            out[key] = value
    return out


def _cell(value, table):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if not math.isfinite(value):
            return "nan" if table else ""
        return f"{value + 0.0:.6g}" if table else _fmt_float(value)
    return str(value)


def _rows_and_scalars(results):
    rows = [_flatten(r) for r in results.get("rows", [])]
    scalars = _flatten({k: v for k, v in results.items() if k != "rows"})
    return rows, scalars


def to_csv(envelope):
    rows, scalars = _rows_and_scalars(_clean(envelope["results"]))
    buf = io.StringIO()
    if rows:
        columns = list(rows[0])
        buf.write(",".join(columns) + "\n")
        for row in rows:
            buf.write(",".join(_cell(row.get(c), False) for c in columns) + "\n")
    else:
        buf.write("key,value\n")
        for key, value in scalars.items():
            if not isinstance(value, (dict, list)):
                buf.write(f"{key},{_cell(value, False)}\n")
    return buf.getvalue()


def _align(header, body):
    widths = [max(len(h), *(len(r[i]) for r in body)) if body else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in body]
    return "\n".join(lines) + "\n"


def to_table(envelope):
    results = _clean(envelope["results"])
    rows, scalars = _rows_and_scalars(results)
    out = [f"# {envelope['command']}\n"]
    flat = [(k, _cell(v, True)) for k, v in scalars.items() if not isinstance(v, (dict, list))]
    if flat:
        out.append(_align(["quantity", "value"], [list(p) for p in flat]))
    if rows:
        columns = list(rows[0])
        out.append(_align(columns, [[_cell(r.get(c), True) for c in columns] for r in rows]))
    prov = _clean(envelope.get("provenance", {}))
    if prov:
        body = [[k, _cell(v["computed"], True), _cell(v["reference"], True), _cell(v["difference"], True)] for k, v in prov.items()]
        out.append(_align(["constant", "computed", "reference", "difference"], body))
    return "\n".join(out)


WRITERS = {"json": to_json, "csv": to_csv, "table": to_table}


# -- provenance -----------------------------------------------------------------


def provenance():
    constants = js.model_constants()
    prov = constants.provenance(REFERENCE_CONSTANTS)
    one_minus_g = 1.0 - constants.g
    kap = js.kapitsa_coefficient()
    for name, value, ref in (
        ("one_minus_g", one_minus_g, REFERENCE_ONE_MINUS_G),
        ("kapitsa_coefficient", kap, REFERENCE_KAPITSA),
        ("kapitsa_coefficient_pi2", kap * math.pi**2, REFERENCE_KAPITSA_PI2),
    ):
        prov[name] = {"computed": value, "reference": ref, "difference": value - ref}
    return prov


def envelope(command, inputs, results):
    return {"command": command, "inputs": inputs, "results": results, "provenance": provenance()}


# -- commands -------------------------------------------------------------------


def cmd_constants(args):
    c = js.model_constants()
    kap = js.kapitsa_coefficient()
    results = dict(c.as_dict())
    results.update(
        one_minus_g=1.0 - c.g,
        ratio_g1_g2=c.ratio,
        kapitsa_coefficient=kap,
        kapitsa_coefficient_pi2=kap * math.pi**2,
    )
    return envelope("constants", {}, results)


def _parse_points(values):
    try:
        return [complex(v.replace(" ", "")) for v in values]
    except ValueError as exc:
        raise UsageError(f"cannot parse point: {exc}") from None


def _scan(start, stop, step):
    if not step > 0 or not stop >= start:
        raise UsageError("scan needs start <= stop and step > 0")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(n)]


def cmd_dispersion(args):
    d = default_dispersion()
    if args.scan:
        points = [complex(v) for v in _scan(*args.scan)]
    elif args.z:
        points = _parse_points(args.z)
    else:
        raise UsageError("give --z points or --scan START STOP STEP")
    inputs = {"points": points, "boundary": args.boundary, "which": args.which}
    names = [LAMBDA0, LAMBDA1] if args.which == "both" else [args.which]
    rows = []
    if args.boundary:
        for z in points:
            if z.imag != 0:
                raise UsageError("boundary points must be real")
            row = {"mu": z.real}
            for name in names:
                b = d.lambda_boundary(z.real, name)
                row[f"{name}_plus"], row[f"{name}_minus"] = b.plus, b.minus
            rows.append(row)
        return envelope("dispersion", inputs, {"rows": rows})
    for z in points:
        if z.imag == 0 and abs(z.real) <= 1.0 and z != 0:
            raise OnCut(f"z={z.real} lies on the cut; pass --boundary for boundary values")
        row = {"z": z}
        lam = d.dispersion_matrix(z)
        row["lambda0"], row["lambda1"] = complex(lam[1, 1]), complex(lam[0, 0])
        for (i, j) in ((0, 0), (1, 0), (1, 1)):
            row[f"Lambda{i + 1}{j + 1}"] = complex(lam[i, j])
        if z != 0:
            p = d.matrix_P(z)
            for (i, j) in ((0, 0), (1, 0), (1, 1)):
                row[f"P{i + 1}{j + 1}"] = complex(p[i, j])
        else:
            # P is singular at the origin.
            for key in ("P11", "P21", "P22"):
                row[key] = complex(math.nan, math.nan)
        rows.append(row)
    results = {"rows": rows}
    real = [r for r in rows if r["z"].imag == 0 and abs(r["z"].real) > 1]
    for name in names:
        signs = [(r["z"].real, np.sign(r[name].real)) for r in real]
        results[f"{name}_sign_changes"] = [
            [a[0], b[0]] for a, b in zip(signs, signs[1:]) if a[1] * b[1] < 0
        ]
    return envelope("dispersion", inputs, results)


def cmd_factorize(args):
    f = default_factorization()
    d = f.dispersion
    points = _parse_points(args.z) if args.z else []
    grid = np.linspace(0.02, 0.98, 64)
    rh = float(f.rh_residual(grid).max())
    rows = []
    for z in points:
        row = {"z": z}
        for k in (0, 1):
            row[f"V{k}"] = complex(f.cauchy_V(k, z))
            row[f"U{k}"] = complex(f.factor_U(k, z))
        row["U1_representation_residual"] = f.check_U1_representation(z)
        rows.append(row)
    results = {
        "v0_m1": f.v0_m1,
        "v1_m1": f.v1_m1,
        "U0_origin": f.factor_U_origin(0),
        "U1_origin": f.factor_U_origin(1),
        "U1_eta0": float(f.factor_U(1, d.eta0).real),
        "rh_residual_max": rh,
        "rh_certificate": rh < args.tol,
    }
    if rows:
        results["rows"] = rows
    return envelope("factorize", {"z": points, "tol": args.tol}, results)


def _float_list(values, name):
    try:
        return [float(v) for v in values]
    except ValueError as exc:
        raise UsageError(f"bad {name}: {exc}") from None


def cmd_solve(args):
    s = js.default_solver()
    coeffs = s.solve_coefficients(args.B)
    xs = _float_list(args.x, "x")
    mus = _float_list(args.mu, "mu")
    rows = []
    for x in xs:
        h = s.eval_h(x, np.array(mus), coeffs)
        rows.extend({"x": x, "mu": m, "h1": float(v[0]), "h2": float(v[1])} for m, v in zip(mus, h))
    results = dict(coeffs.as_dict())
    results["U1_eta0"] = s.u1_eta0
    results["rows"] = rows
    return envelope("solve", {"B": args.B, "x": xs, "mu": mus}, results)


def cmd_resistance(args):
    params = js.PhysicalParams(T_s=args.T_s, m=args.m, s=args.s, a=args.a, n=args.n)
    R = js.kapitsa_resistance(params)
    results = {
        "kapitsa_coefficient": js.kapitsa_coefficient(),
        "resistance": R,
        "flux_scale_Q0": js.flux_scale(params),
    }
    if args.Q_x is not None:
        results["Q_x"] = args.Q_x
        results["B"] = js.flux_amplitude(args.Q_x, params)
        results["delta_T"] = js.temperature_jump(args.Q_x, params)
    if (args.a is None) != (args.n is None):
        raise InvalidParams("give both --a and --n for the validity check")
    if args.a is not None:
        threshold = js.validity_threshold(args.a, args.n, args.m)
        results["validity_threshold"] = threshold
        results["valid"] = args.T_s >= threshold
        results["warning"] = "" if args.T_s >= threshold else "T_s below validity threshold"
    inputs = {"T_s": args.T_s, "m": args.m, "s": args.s, "Q_x": args.Q_x, "a": args.a, "n": args.n}
    return envelope("resistance", inputs, results)


def cmd_oracle(args):
    sol = solve_halfspace(args.B, L=args.L, n_mu=args.n_mu, n_x=args.n_x, tol=args.tol)
    coeffs = js.solve_coefficients(args.B)
    report = compare_with_analytic(sol, coeffs) if args.B != 0 else None
    results = {
        "eps_T_estimate": sol.eps_T_estimate,
        "eps_T_analytic": coeffs.eps_T,
        "relative_error": report.eps_relative_error if report else 0.0,
        "iterations": sol.iterations,
        "residual": sol.residual,
        "flux_variation": sol.flux_variation,
    }
    if report:
        results["max_discrepancy"] = report.max_discrepancy
        results["l2_discrepancy"] = report.l2_discrepancy
    results["rows"] = [{"x": float(x), "flux": float(q)} for x, q in zip(sol.grid.x_nodes, sol.flux_profile)]
    inputs = {"B": args.B, "L": args.L, "n_mu": args.n_mu, "n_x": args.n_x, "tol": args.tol}
    return envelope("oracle", inputs, results)


# -- parser -----------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=sorted(WRITERS), default="json", help="output format (default: json)")
    common.add_argument("--output", help="write to this path instead of stdout")

    parser = _Parser(prog="bosejump", description="Temperature jump in a degenerate Bose gas.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("constants", parents=[common], help="model constants with reference values")
    p.set_defaults(func=cmd_constants, tol=None)

    p = sub.add_parser("dispersion", parents=[common], help="dispersion functions at points")
    p.add_argument("--z", nargs="+", help="complex points, e.g. 2 1.5+0.5j")
    p.add_argument("--scan", nargs=3, type=float, metavar=("START", "STOP", "STEP"), help="real scan")
    p.add_argument("--boundary", action="store_true", help="treat points as mu on the cut (-1, 1)")
    p.add_argument("--which", choices=[LAMBDA0, LAMBDA1, "both"], default="both")
    p.set_defaults(func=cmd_dispersion, tol=None)

    p = sub.add_parser("factorize", parents=[common], help="factor functions and certificates")
    p.add_argument("--z", nargs="+", help="complex points off [0, 1]")
    p.add_argument("--tol", type=float, default=1e-6, help="certificate threshold (default: 1e-6)")
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("solve", parents=[common], help="analytic coefficients and field")
    p.add_argument("--B", type=float, default=1.0, help="heat-flux amplitude (default: 1)")
    p.add_argument("--x", nargs="+", default=["0", "1", "5"], help="depths (default: 0 1 5)")
    p.add_argument("--mu", nargs="+", default=["-0.5", "0.5"], help="directions in [-1, 1) (default: -0.5 0.5)")
    p.set_defaults(func=cmd_solve, tol=None)

    p = sub.add_parser("resistance", parents=[common], help="Kapitsa resistance in SI units")
    p.add_argument("--T-s", dest="T_s", type=float, required=True, help="wall temperature in K")
    p.add_argument("--m", type=float, required=True, help="particle mass in kg")
    p.add_argument("--s", type=int, default=0, help="spin (default: 0)")
    p.add_argument("--Q-x", dest="Q_x", type=float, help="heat flux in W/m^2")
    p.add_argument("--a", type=float, help="scattering length in m")
    p.add_argument("--n", type=float, help="number density in 1/m^3")
    p.set_defaults(func=cmd_resistance, tol=None)

    p = sub.add_parser("oracle", parents=[common], help="discrete-ordinates cross-check")
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--L", type=float, default=30.0, help="slab depth (default: 30)")
    p.add_argument("--n-mu", dest="n_mu", type=int, default=64, help="directions per half-range (default: 64)")
    p.add_argument("--n-x", dest="n_x", type=int, default=600, help="cells (default: 600)")
    p.add_argument("--tol", type=float, default=1e-10, help="GMRES relative tolerance (default: 1e-10)")
    p.set_defaults(func=cmd_oracle)
    return parser


def run(argv=None):
    args = build_parser().parse_args(argv)
    try:
        env = args.func(args)
    except DomainError as exc:
        print(f"bosejump: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except BoseJumpError as exc:
        print(f"bosejump: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = WRITERS[args.format](env)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main():
    sys.exit(run())
