"""Command-line front end.

Commands::

    conedist analyze GRAPH
    conedist epsilon GRAPH MATRIX
    conedist decompose SDP [--assert-identity-feasible]
    conedist maxcut GRAPH [--output SDP]
    conedist sample GRAPH [--output MATRIX] [--boundary P]

Common flags: ``--tol`` (default 1e-8), ``--json``, ``--seed`` (default 0).
Exit codes: 0 success, 2 input error, 3 non-member, 4 bound precondition
failure, 5 solver failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .completion import SolverFailure, epsilon_at
from .graph import GraphError, read_graph
from .partial import PartialMatrixError, format_partial_matrix, read_partial_matrix
from .recognition import is_in_class_G
from .sampling import sample_partially_positive
from .sdp import (SdpError, bound_gap, decompose, maxcut_sdp, read_sdp, solve, solve_decomposed,
                  sparsity_graph, write_sdp)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NON_MEMBER = 3
EXIT_BOUND = 4
EXIT_SOLVER = 5

COMMANDS = ("analyze", "epsilon", "decompose", "maxcut", "sample")


@dataclass
class JobConfig:
    command: str
    inputs: list[str] = field(default_factory=list)
    tol: float = 1e-8
    json: bool = False
    seed: int = 0
    output: str | None = None
    assert_identity_feasible: bool = False
    boundary: float = 0.5

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


class InputError(Exception):
    pass


def num(x: float):
    """Round to 10 significant digits; infinities become strings."""
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.10g}")


def _emit(cfg: JobConfig, report: dict, out) -> None:
    if cfg.json:
        out.write(json.dumps(report, indent=2) + "\n")
        return
    for k, v in report.items():
        if isinstance(v, float):
            v = f"{v:.10g}"
        elif isinstance(v, bool):
            v = "true" if v else "false"
        elif v is None:
            v = "-"
        elif isinstance(v, list) and not (v and isinstance(v[0], list)):
            v = " ".join(str(x) for x in v) or "-"
        out.write(f"{k}: {v}\n")


def _load_graph(path):
    try:
        return read_graph(path)
    except (OSError, GraphError) as exc:
        raise InputError(f"cannot read graph {path}: {exc}") from exc


def cmd_analyze(cfg: JobConfig, out) -> int:
    g = _load_graph(cfg.inputs[0])
    cert = is_in_class_G(g)
    if cfg.json:
        report = {
            "member": cert.member,
            "vertices": g.n,
            "edges": g.m,
            "chordal_girth": num(cert.chordal_girth),
            "epsilon": num(cert.epsilon),
            "atoms": [
                {"vertices": list(r.vertices), "separator": list(r.separator),
                 "cone_vertices": r.cone_vertices, "remainder": r.remainder,
                 "series_parallel": r.series_parallel, "chordal_girth": num(r.chordal_girth),
                 "reduction": [list(s) for s in r.trace], "kernel": r.kernel}
                for r in cert.per_atom
            ],
            "refutation": None if cert.refutation is None else {
                "atom": list(cert.decomposition.atoms[cert.refutation[0]]),
                "reason": cert.refutation[1]},
        }
        out.write(json.dumps(report, indent=2) + "\n")
    else:
        out.write(cert.to_text())
    return EXIT_OK if cert.member else EXIT_NON_MEMBER


def cmd_epsilon(cfg: JobConfig, out) -> int:
    g = _load_graph(cfg.inputs[0])
    try:
        a = read_partial_matrix(cfg.inputs[1], g)
    except (OSError, PartialMatrixError) as exc:
        raise InputError(f"cannot read matrix {cfg.inputs[1]}: {exc}") from exc
    res = epsilon_at(a, tol=min(cfg.tol, 1e-9))
    if cfg.json:
        out.write(json.dumps(res.to_json(), indent=2) + "\n")
    else:
        _emit(cfg, {"epsilon": num(res.epsilon), "raw_epsilon": num(res.raw_epsilon),
                    "dual_value": num(res.dual_value), "gap": num(res.gap), "rank": res.rank}, out)
    return EXIT_OK


def _decompose_report(cfg: JobConfig, s, out, assert_feasible: bool) -> int:
    full = solve(s, tol=cfg.tol)
    if full.status != "optimal":
        out.write(f"error: full program solve ended with status {full.status}\n")
        return EXIT_SOLVER
    d = decompose(s)
    rel = solve_decomposed(d, tol=cfg.tol)
    if rel.status != "optimal":
        out.write(f"error: decomposed program solve ended with status {rel.status}\n")
        return EXIT_SOLVER
    g = sparsity_graph(s)
    cert = is_in_class_G(g)
    report = {
        "n": s.n,
        "alpha": num(full.value),
        "alpha_prime": num(rel.value),
        "cliques": len(d.clique_blocks),
        "graph_member": cert.member,
        "graph_epsilon": num(cert.epsilon),
        "bound_lower": None,
        "bound_upper": None,
        "contained": None,
        "note": None,
    }
    code = EXIT_OK
    if not assert_feasible:
        report["note"] = "bound suppressed: identity feasibility not asserted"
    elif not s.identity_feasible(tol=max(cfg.tol, 1e-9)):
        report["note"] = "warning: I/n violates the constraints; bound suppressed"
        code = EXIT_BOUND
    elif not cert.member:
        report["note"] = "bound suppressed: conical distance of the sparsity graph unknown"
    else:
        lo, hi = bound_gap(rel.value, cert.epsilon, float(np.trace(s.objective)), s.n)
        slack = 10 * cfg.tol * (1 + abs(full.value))
        report.update(bound_lower=num(lo), bound_upper=num(hi),
                      contained=bool(lo - slack <= full.value <= hi + slack))
    _emit(cfg, report, out)
    return code


def cmd_decompose(cfg: JobConfig, out) -> int:
    try:
        s = read_sdp(cfg.inputs[0])
    except (OSError, SdpError) as exc:
        raise InputError(f"cannot read SDP {cfg.inputs[0]}: {exc}") from exc
    return _decompose_report(cfg, s, out, cfg.assert_identity_feasible)


def cmd_maxcut(cfg: JobConfig, out) -> int:
    g = _load_graph(cfg.inputs[0])
    if g.n == 0:
        raise InputError("graph has no vertices")
    s = maxcut_sdp(g)
    if cfg.output:
        write_sdp(s, cfg.output)
    return _decompose_report(cfg, s, out, True)


def cmd_sample(cfg: JobConfig, out) -> int:
    g = _load_graph(cfg.inputs[0])
    if g.n == 0:
        raise InputError("graph has no vertices")
    a = sample_partially_positive(g, np.random.default_rng(cfg.seed), boundary=cfg.boundary)
    text = format_partial_matrix(a)
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        out.write(text)
    return EXIT_OK


HANDLERS = {"analyze": cmd_analyze, "epsilon": cmd_epsilon, "decompose": cmd_decompose,
            "maxcut": cmd_maxcut, "sample": cmd_sample}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-8, help="solver tolerance (default 1e-8)")
    common.add_argument("--json", action="store_true", help="emit JSON instead of key-value text")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p = argparse.ArgumentParser(prog="conedist", description="PSD completion and sparse SDP decomposition")
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", parents=[common], help="membership in the class G")
    a.add_argument("graph")
    e = sub.add_parser("epsilon", parents=[common], help="conical distance at a partial matrix")
    e.add_argument("graph")
    e.add_argument("matrix")
    d = sub.add_parser("decompose", parents=[common], help="full and clique-decomposed SDP values")
    d.add_argument("sdp")
    d.add_argument("--assert-identity-feasible", action="store_true",
                   help="assert that I/n is feasible (also checked numerically)")
    m = sub.add_parser("maxcut", parents=[common], help="rescaled MAX-CUT relaxation of a graph")
    m.add_argument("graph")
    m.add_argument("--output", "-o", help="write the SDP file here")
    s = sub.add_parser("sample", parents=[common], help="seeded trace-one partially positive matrix")
    s.add_argument("graph")
    s.add_argument("--output", "-o", help="write the matrix file here")
    s.add_argument("--boundary", type=float, default=0.5, help="probability of a boundary sample")
    return p


def parse_config(argv) -> JobConfig:
    ns = build_parser().parse_args(argv)
    inputs = [getattr(ns, k) for k in ("graph", "matrix", "sdp") if getattr(ns, k, None) is not None]
    return JobConfig(command=ns.command, inputs=inputs, tol=ns.tol, json=ns.json, seed=ns.seed,
                     output=getattr(ns, "output", None),
                     assert_identity_feasible=getattr(ns, "assert_identity_feasible", False),
                     boundary=getattr(ns, "boundary", 0.5))


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return HANDLERS[cfg.command](cfg, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SdpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
