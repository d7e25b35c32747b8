"""Command-line front door: one subcommand per experiment family.

Every run emits a single JSON report (stdout or --out) embedding the
resolved configuration, the seed, and the artifact version; identical
configuration yields a byte-identical report.  Exit codes: 0 success,
1 domain or validation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Dict, List, Optional

import numpy as np

from . import choi, korovkin, lab, minimax, rigidity, uep
from .errors import HyperrigidError
from .expr import compile_expr
from .function_system import FunctionSystem, choquet_boundary, classify_convexity
from .serialize import dump_json, report_envelope


def _float_list(text: str) -> List[float]:
    return [float(tok) for tok in text.split(",") if tok.strip() != ""]


def _int_list(text: str) -> List[int]:
    return [int(tok) for tok in text.split(",") if tok.strip() != ""]


def _add_function_flags(p: argparse.ArgumentParser, grid_default: int) -> None:
    p.add_argument("--f", required=True, help="function of x, e.g. 'abs(x-1/2)'")
    p.add_argument("--interval", nargs=2, type=float, default=[0.0, 1.0],
                   metavar=("A", "B"))
    p.add_argument("--grid", type=int, default=grid_default,
                   help="grid resolution m")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperrigid",
        description="Numerical laboratory for hyperrigidity experiments",
    )
    parser.add_argument("--config", help="key=value file; flags override it")
    parser.add_argument("--out", help="write the JSON report here instead of stdout")
    parser.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convexity", help="strict convexity/concavity verdict")
    _add_function_flags(p, 101)
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("boundary", help="grid Choquet boundary of span{1, x, f}")
    _add_function_flags(p, 101)

    p = sub.add_parser("counterexample",
                       help="non-rigidity witness: diagonal A and UCP map "
                            "fixing A, f(A) but moving A^2")
    _add_function_flags(p, 129)

    p = sub.add_parser("uep", help="unique-extension-property search for a "
                                   "diagonal-operator span")
    p.add_argument("--diag", required=True, type=_float_list,
                   help="diagonal of A, e.g. 0,0.5,1")
    p.add_argument("--span", default="1,A",
                   help="comma list from {1, A, A2, A3}")
    p.add_argument("--probes", default=None,
                   help="comma list from {A2, A3, A4}; default: first power "
                        "outside the span")
    p.add_argument("--restarts", type=int, default=16)

    p = sub.add_parser("volterra", help="spectral report for the discretized "
                                        "Volterra operator")
    p.add_argument("--n", type=int, default=256)

    p = sub.add_parser("isometry-demo",
                       help="UEP search for random unitary generators")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--restarts", type=int, default=4)

    p = sub.add_parser("korovkin", help="convergence tables")
    p.add_argument("--family", choices=["bernstein", "matrix-pinching"],
                   default="bernstein")
    p.add_argument("--n-list", type=_int_list, default=[10, 100, 1000],
                   help="Bernstein degrees or pinching block counts")
    p.add_argument("--d", type=int, default=16, help="matrix dimension")

    p = sub.add_parser("minimax", help="extension minimax identity and "
                                       "boundary envelope on a finite point set")
    p.add_argument("--points", type=_float_list, default=[0.0, 0.5, 1.0])
    p.add_argument("--f", default=None,
                   help="optional third basis function (default: span{1, x})")
    p.add_argument("--state-point", type=float, default=0.5,
                   help="point of X whose evaluation is the state")
    p.add_argument("--probe", default="x^2", help="probe function of x")
    p.add_argument("--tol", type=float, default=1e-8)

    p = sub.add_parser("dominate", help="almost-domination check for the "
                                        "Volterra span")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--include-square", action="store_true",
                   help="augment span{V, V*} with V^2, V^2*")
    p.add_argument("--eps", type=_float_list, default=[0.5, 0.1, 0.01])
    p.add_argument("--p-scale", type=float, default=1.0,
                   help="probe p = p_scale * identity")
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: List[str]) -> List[str]:
    """Pre-scan for --config and turn file pairs into leading arguments so
    explicit flags override them."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if not known.config:
        return argv
    injected: List[str] = []
    with open(known.config) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise HyperrigidError(f"config line is not key=value: {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            injected.extend([f"--{key}", value])
    # Subcommand flags must come after the subcommand name; keep the
    # original order and append injected pairs right after it.
    return argv + injected


def _run_config(args: argparse.Namespace) -> Dict:
    skip = {"config", "out"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _cmd_convexity(args) -> Dict:
    f = compile_expr(args.f)
    fs = FunctionSystem(args.interval[0], args.interval[1], f, args.grid)
    verdict = classify_convexity(fs, tol=args.tol)
    return {
        "kind": verdict.kind.value,
        "witness_triple": verdict.witness,
        "note": "verdict is grid-relative",
    }


def _cmd_boundary(args) -> Dict:
    f = compile_expr(args.f)
    fs = FunctionSystem(args.interval[0], args.interval[1], f, args.grid)
    flags = choquet_boundary(fs)
    graph = fs.graph()
    return {
        "points": [[float(x), float(y)] for x, y in graph],
        "boundary_flags": [bool(b) for b in flags],
        "boundary_count": int(flags.sum()),
    }


def _cmd_counterexample(args) -> Dict:
    f = compile_expr(args.f)
    verdict = rigidity.search_counterexample(
        f, args.interval[0], args.interval[1], max_grid=args.grid
    )
    out: Dict = {"status": verdict.status, "grid_size": verdict.grid_size}
    if verdict.report is not None:
        r = verdict.report
        out["witness"] = {"x0": r.witness.x0, "support": list(r.witness.support)}
        out["a_diagonal"] = [float(x.real) for x in np.diagonal(r.a_matrix)]
        out["dimension"] = r.a_matrix.shape[0]
        out["phi"] = r.phi
        out["residual_fix_a"] = r.residual_fix_a
        out["residual_fix_fa"] = r.residual_fix_fa
        out["deviation"] = r.deviation
    else:
        out["note"] = ("no witness up to the grid cap; candidate status is "
                       "evidence, not proof, of rigidity")
    return out


_SPAN_TOKENS = {"1": 0, "A": 1, "A2": 2, "A^2": 2, "A3": 3, "A^3": 3, "A4": 4, "A^4": 4}


def _diag_power(diag: List[float], power: int) -> np.ndarray:
    return np.diag(np.array(diag, dtype=complex) ** power)


def _cmd_uep(args) -> Dict:
    powers = []
    for token in args.span.split(","):
        token = token.strip()
        if token not in _SPAN_TOKENS:
            raise HyperrigidError(f"unknown span token {token!r}; use 1, A, A2, A3")
        powers.append(_SPAN_TOKENS[token])
    if 0 not in powers:
        powers.insert(0, 0)
    system = uep.operator_system([_diag_power(args.diag, p) for p in sorted(set(powers))])
    if args.probes:
        probe_powers = [_SPAN_TOKENS[t.strip()] for t in args.probes.split(",")]
    else:
        probe_powers = [max(powers) + 1]
    probes = [_diag_power(args.diag, p) for p in probe_powers]
    params = uep.UepParams(restarts=args.restarts, seed=args.seed)
    report = uep.uep_check(system, probes, params)
    return {
        "status": report.status,
        "deviation": report.deviation,
        "final_residual": report.final_residual,
        "restarts": report.restarts,
        "iterations": report.iterations,
        "probe_powers": probe_powers,
        "witness": report.witness,
        "interpretation": report.interpretation,
    }


def _cmd_volterra(args) -> Dict:
    return lab.volterra_spectral_report(args.n)


def _cmd_isometry_demo(args) -> Dict:
    params = uep.UepParams(restarts=args.restarts, seed=args.seed)
    result = lab.unitary_generator_demo(args.n, args.k, args.seed, params)
    return {
        "status": result.report.status,
        "deviation": result.report.deviation,
        "redraws": result.redraws,
        "commutant_dimension": result.commutant_dimension,
        "interpretation": result.report.interpretation,
    }


def _cmd_korovkin(args) -> Dict:
    family = args.family.replace("-", "_")
    return korovkin.korovkin_table(family, args.n_list, dimension=args.d,
                                   seed=args.seed)


def _cmd_minimax(args) -> Dict:
    functions = [lambda x: x]
    labels = ["1", "u"]
    if args.f:
        functions.append(compile_expr(args.f))
        labels.append(args.f)
    fs = minimax.build_system(args.points, functions, labels=labels)
    matches = np.flatnonzero(np.abs(fs.points - args.state_point) <= 1e-12)
    if len(matches) == 0:
        raise HyperrigidError(
            f"state point {args.state_point!r} is not one of the points {list(fs.points)}"
        )
    p_index = int(matches[0])
    phi = minimax.evaluation_state(fs, p_index)
    probe = compile_expr(args.probe)
    result = minimax.verify_minimax(fs, phi, probe, tol=args.tol)
    result["envelope"] = minimax.boundary_envelope(fs, p_index, probe)
    result["basis"] = labels
    return result


def _cmd_dominate(args) -> Dict:
    vd = lab.discretize_volterra(args.n)
    basis = lab.volterra_hermitian_span(vd, include_square=args.include_square)
    p = args.p_scale * np.eye(args.n)
    results = lab.almost_dominated_check(basis, p, args.eps)
    return {
        "n": args.n,
        "include_square": bool(args.include_square),
        "p_scale": args.p_scale,
        "results": [
            {"epsilon": r.epsilon, "margin": r.margin, "success": r.success,
             "iterations": r.iterations, "converged": r.converged}
            for r in results
        ],
        "success_all": all(r.success for r in results),
    }


_HANDLERS = {
    "convexity": _cmd_convexity,
    "boundary": _cmd_boundary,
    "counterexample": _cmd_counterexample,
    "uep": _cmd_uep,
    "volterra": _cmd_volterra,
    "isometry-demo": _cmd_isometry_demo,
    "korovkin": _cmd_korovkin,
    "minimax": _cmd_minimax,
    "dominate": _cmd_dominate,
}


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, argv)
    except (OSError, HyperrigidError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    args = parser.parse_args(argv)
    try:
        result = _HANDLERS[args.command](args)
    except HyperrigidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = report_envelope(args.command, _run_config(args), result, seed=args.seed)
    text = dump_json(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
