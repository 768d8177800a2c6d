"""Command-line interface and the package's file formats.

Exit codes: 0 success, 2 input error, 3 non-convergence or dead branch,
4 converged solution with success probability below target.  All
randomness flows from ``--seed`` through named sub-streams; angles are
radians everywhere; CSV uses '.' decimals and no locale.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from . import experiments, plotting, qap, qubo
from .classical import estimate_iterations
from .core import (ControlledPhase, DenseOperator, DiagonalOperator,
                   PhaseCircuit, SinglePhase, equal_superposition)
from .engine import EngineConfig, iterate, recover_phase, success_probability
from .errors import DeadBranchError, QPowerError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NO_CONVERGENCE = 3
EXIT_LOW_CONFIDENCE = 4


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# file formats


def load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    return data


def parse_qubo(data: dict) -> qubo.QuboInstance:
    try:
        return qubo.QuboInstance(
            n=int(data["n"]),
            linear=tuple(float(c) for c in data["linear"]),
            quadratic=tuple((int(j), int(k), float(v))
                            for j, k, v in data.get("quadratic", ())),
            sense=str(data.get("sense", qubo.MAXIMIZE)),
        )
    except (KeyError, TypeError, ValueError, QPowerError) as exc:
        raise InputError(f"invalid QUBO file: {exc}") from exc


def parse_qap(data: dict) -> qap.QapInstance:
    try:
        return qap.QapInstance(n=int(data["n"]),
                               F=np.asarray(data["F"], dtype=float),
                               D=np.asarray(data["D"], dtype=float),
                               B=np.asarray(data["B"], dtype=float))
    except (KeyError, TypeError, ValueError, QPowerError) as exc:
        raise InputError(f"invalid QAP file: {exc}") from exc


def parse_operator(data: dict):
    try:
        if "phases" in data:
            return DiagonalOperator(int(data["n"]),
                                    np.asarray(data["phases"], dtype=float))
        if "re" in data and "im" in data:
            mat = (np.asarray(data["re"], dtype=float)
                   + 1j * np.asarray(data["im"], dtype=float))
            return DenseOperator(int(data["n"]), mat)
    except (KeyError, TypeError, ValueError, QPowerError) as exc:
        raise InputError(f"invalid operator file: {exc}") from exc
    raise InputError(
        "operator file needs either 'phases' (diagonal) or 're'+'im' (dense)")


def circuit_to_json(circuit: PhaseCircuit, extra: dict | None = None) -> dict:
    gates = []
    for g in circuit.gates:
        if isinstance(g, SinglePhase):
            gates.append({"type": "single", "qubit": g.qubit,
                          "phase0": g.phase0, "phase1": g.phase1})
        else:
            gates.append({"type": "controlled", "control": g.control,
                          "target": g.target, "phase10": g.phase10,
                          "phase11": g.phase11})
    doc = {"n": circuit.n, "gates": gates}
    if extra:
        doc.update(extra)
    return doc


def circuit_from_json(data: dict) -> PhaseCircuit:
    try:
        gates: list = []
        for g in data["gates"]:
            if g["type"] == "single":
                gates.append(SinglePhase(int(g["qubit"]), float(g["phase0"]),
                                         float(g["phase1"])))
            elif g["type"] == "controlled":
                gates.append(ControlledPhase(int(g["control"]),
                                             int(g["target"]),
                                             float(g["phase10"]),
                                             float(g["phase11"])))
            else:
                raise InputError(f"unknown gate type {g['type']!r}")
        return PhaseCircuit(int(data["n"]), tuple(gates))
    except (KeyError, TypeError, ValueError, QPowerError) as exc:
        raise InputError(f"invalid circuit file: {exc}") from exc


def dump_json(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def write_manifest(path: str, command: str, parameters: dict,
                   seed) -> None:
    doc = {
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc)
                     .isoformat(timespec="seconds"),
    }
    dump_json(doc, path)


# ---------------------------------------------------------------------------
# subcommands


def _engine_config(args, default_tol=1e-6) -> EngineConfig:
    return EngineConfig(
        eta=args.eta,
        mode=args.mode,
        tol=args.tol if args.tol is not None else default_tol,
        window=args.window,
        max_iterate=args.max_iterate,
        seed=args.seed,
        tomography_stride=args.stride,
    )


def _dominant_set_of(op, eta: float):
    """Basis indices (diagonal) or eigvec columns (dense) of maximal
    |eta - lambda|; returns (indices, projector_rows or None)."""
    if isinstance(op, DiagonalOperator):
        r = np.abs(eta - op.eigenvalues())
        return np.flatnonzero(r >= r.max() - 1e-12), None
    vals, vecs = np.linalg.eig(op.entries)
    r = np.abs(eta - vals)
    cols = np.flatnonzero(r >= r.max() - 1e-9)
    return cols, vecs[:, cols]


def cmd_power(args) -> int:
    op = parse_operator(load_json(args.input))
    cfg = _engine_config(args)
    v0 = equal_superposition(op.n)
    try:
        summary, trace = iterate(op, v0, cfg)
    except DeadBranchError as exc:
        print(f"dead branch: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE

    alpha = summary.alpha_final
    phi = recover_phase(alpha) if alpha <= 2.0 + 1e-12 else float("nan")
    dom, proj = _dominant_set_of(op, cfg.eta)
    if proj is None:
        success = success_probability(summary.v_final, dom)
    else:
        success = float(np.sum(np.abs(proj.conj().T
                                      @ summary.v_final.amps) ** 2))

    print(f"eigenphase:   {phi!r}")
    print(f"alpha:        {alpha!r}")
    print(f"iterations:   {summary.iterations}")
    print(f"converged:    {str(summary.converged).lower()}")
    print(f"success_prob: {success!r}")
    if args.json:
        dump_json({
            "eigenphase": phi,
            "alpha": alpha,
            "iterations": summary.iterations,
            "converged": summary.converged,
            "success_prob": success,
            "mode": cfg.mode,
            "eta": cfg.eta,
            "seed": cfg.seed,
        }, args.json)
    if args.trace:
        dump_json({
            "mode": trace.mode,
            "seed": trace.seed,
            "records": [asdict(r) for r in trace.records],
        }, args.trace)
    manifest_anchor = args.json or args.trace
    if manifest_anchor:
        write_manifest(manifest_anchor + ".manifest.json", "power",
                       _manifest_params(args), args.seed)
    return EXIT_OK if summary.converged else EXIT_NO_CONVERGENCE


def cmd_solve_qubo(args) -> int:
    inst = parse_qubo(load_json(args.input))
    if args.sense:
        inst = qubo.QuboInstance(inst.n, inst.linear, inst.quadratic,
                                 sense=args.sense)
    cfg = _engine_config(args)
    sol = qubo.solve(inst, cfg)

    bits_str = "".join(str(b) for b in sol.bitstring)
    print(f"bitstring:    {bits_str}")
    print(f"value:        {sol.value!r}")
    print(f"iterations:   {sol.iterations}")
    print(f"converged:    {str(sol.converged).lower()}")
    print(f"phi:          {sol.phi_recovered!r}")
    print(f"success_prob: {sol.success_prob!r}")
    agreement = None
    if args.verify:
        best_bits, best_val = qubo.brute_force_optimum(inst)
        agreement = best_bits == sol.bitstring
        print(f"brute_force:  {''.join(str(b) for b in best_bits)} "
              f"value {best_val!r} agreement {str(agreement).lower()}")
    if args.json:
        doc = {
            "bitstring": list(sol.bitstring),
            "value": sol.value,
            "iterations": sol.iterations,
            "converged": sol.converged,
            "phi_recovered": sol.phi_recovered,
            "success_prob": sol.success_prob,
            "dominant_bitstrings": [list(b) for b in
                                    sol.dominant_bitstrings],
            "sense": inst.sense,
        }
        if agreement is not None:
            doc["brute_force_agreement"] = agreement
        dump_json(doc, args.json)
        write_manifest(args.json + ".manifest.json", "solve-qubo",
                       _manifest_params(args), args.seed)
    if not sol.converged:
        return EXIT_NO_CONVERGENCE
    if sol.success_prob < 0.5:
        return EXIT_LOW_CONFIDENCE
    return EXIT_OK


def cmd_compile(args) -> int:
    data = load_json(args.input)
    convention = (qubo.GateConvention.ISING_PM if args.convention == "ising"
                  else qubo.GateConvention.BINARY01)
    extra: dict = {}
    if "F" in data:
        inst_qap = parse_qap(data)
        enc = qap.qap_to_qubo(inst_qap, penalty=args.penalty)
        inst = enc.qubo
        convention = qubo.GateConvention.BINARY01
        extra["qap"] = {"order": inst_qap.n, "penalty": enc.penalty,
                        "constant": enc.constant}
    else:
        inst = parse_qubo(data)
    plan = qubo.make_scaling(inst, convention=convention)
    circuit = qubo.compile_circuit(inst, convention, plan)
    n_objective = qubo.gate_count(inst.n, len(inst.quadratic))
    extra.update({
        "convention": convention.name,
        "gate_count": {"objective": n_objective, "offset": 1,
                       "total": n_objective + 1},
        "scaling": {"scale": plan.scale, "offset": plan.offset,
                    "lower_bound": plan.lower_bound,
                    "upper_bound": plan.upper_bound, "sense": plan.sense},
    })
    dump_json(circuit_to_json(circuit, extra), args.out)
    if args.out:
        write_manifest(args.out + ".manifest.json", "compile",
                       _manifest_params(args), None)
    return EXIT_OK


def _write_rows_csv(path: str, experiment: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["experiment", "n", "gap", "run_index", "seed",
                    "iterations", "converged"])
        for r in rows:
            w.writerow([experiment, r.n, repr(float(r.gap)), r.run_index,
                        r.seed, r.iterations, str(r.converged).lower()])


def _write_summary_csv(path: str, means) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["experiment", "n", "gap", "runs", "mean_iterations",
                    "all_converged"])
        for m in means:
            w.writerow([m["experiment"], m["n"], repr(float(m["gap"])),
                        m["runs"], repr(float(m["mean_iterations"])),
                        str(m["all_converged"]).lower()])


def cmd_experiment(args) -> int:
    if args.which == "fig2":
        n_list = (tuple(args.n_list) if args.n_list
                  else experiments.FIG2_N_LIST)
        table = experiments.run_fig2(
            n_list=n_list, gap=args.gap, runs=args.runs, target=args.target,
            seed=args.seed)
        x_key, xlabel = "n", "number of qubits"
    else:
        gaps = tuple(args.gaps) if args.gaps else experiments.FIG3_GAPS
        table = experiments.run_fig3(
            n=args.n, gap_list=gaps, runs=args.runs, target=args.target,
            seed=args.seed, low_memory=args.low_memory)
        x_key, xlabel = "gap", "eigengap"

    means = table.group_means()
    base = f"{args.out_dir.rstrip('/')}/{table.experiment}"
    _write_rows_csv(base + "_rows.csv", table.experiment, table.rows)
    _write_summary_csv(base + "_summary.csv", means)
    write_manifest(base + ".manifest.json", f"experiment {args.which}",
                   _manifest_params(args), args.seed)
    if not args.no_plot:
        points = [(m[x_key], m["mean_iterations"]) for m in means]
        svg = plotting.polyline_plot(points, xlabel, "mean iterations",
                                     f"iterations vs {xlabel}")
        with open(base + ".svg", "w", encoding="utf-8") as fh:
            fh.write(svg)
    for m in means:
        print(f"{m['experiment']} n={m['n']} gap={m['gap']} "
              f"mean_iterations={m['mean_iterations']:.1f} "
              f"runs={m['runs']}")
    print(f"wrote {base}_rows.csv, {base}_summary.csv")
    return EXIT_OK


def cmd_estimate(args) -> int:
    est = estimate_iterations(args.phi1, args.phi2, args.n, args.eta)
    print(f"estimated_iterations: {est!r}")
    if args.json:
        dump_json({"phi1": args.phi1, "phi2": args.phi2, "n": args.n,
                   "eta": args.eta, "estimated_iterations": est}, args.json)
    return EXIT_OK


def _manifest_params(args) -> dict:
    skip = {"func", "which"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ---------------------------------------------------------------------------
# parser


def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eta", type=float, default=1.0,
                   help="shift of (eta*I - U); default 1")
    p.add_argument("--mode", choices=["postselect", "sample"],
                   default="postselect")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iterate", type=int, default=None,
                   dest="max_iterate")
    p.add_argument("--tol", type=float, default=None,
                   help="tomography stopping tolerance on p1 (default 1e-6)")
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--stride", type=int, default=5,
                   help="compare branch statistics every this many steps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpower",
        description="Measurement-driven shifted power iteration and "
                    "phase-circuit solvers for QUBO/Ising/QAP.")
    parser.add_argument("--version", action="version",
                        version=f"qpower {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("power", help="find the dominant eigenphase of an "
                                     "operator file (leftmost bit is "
                                     "qubit 0)")
    p.add_argument("input", help="diagonal {'n','phases'} or dense "
                                 "{'n','re','im'} JSON")
    _add_engine_flags(p)
    p.add_argument("--json", default=None, help="write a JSON report here")
    p.add_argument("--trace", default=None,
                   help="write the per-iteration trace here")
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("solve-qubo", help="compile a QUBO file and extract "
                                          "its optimum with the engine")
    p.add_argument("input", help="QUBO JSON "
                                 "{'n','linear','quadratic','sense'}")
    p.add_argument("--sense", choices=["max", "min"], default=None,
                   help="override the file's optimisation sense")
    _add_engine_flags(p)
    p.add_argument("--verify", action="store_true",
                   help="also brute-force the optimum (n <= 20) and report "
                        "agreement")
    p.add_argument("--json", default=None)
    p.set_defaults(func=cmd_solve_qubo)

    p = sub.add_parser("compile", help="emit the phase circuit of a QUBO "
                                       "or QAP file as JSON")
    p.add_argument("input")
    p.add_argument("--convention", choices=["binary01", "ising"],
                   default="binary01")
    p.add_argument("--penalty", type=float, default=None,
                   help="QAP constraint penalty (default: 2*spread + 1)")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("experiment", help="run the iteration-count studies "
                                          "and write CSV (+SVG)")
    p.add_argument("which", choices=["fig2", "fig3"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=experiments.DEFAULT_RUNS)
    p.add_argument("--target", type=float, default=experiments.DEFAULT_TARGET)
    p.add_argument("--gap", type=float, default=experiments.DEFAULT_GAP,
                   help="fig2 eigengap")
    p.add_argument("--n-list", type=int, nargs="+", default=None,
                   dest="n_list", help="fig2 qubit counts")
    p.add_argument("--n", type=int, default=experiments.FIG3_N,
                   help="fig3 qubit count")
    p.add_argument("--gaps", type=float, nargs="+", default=None,
                   help="fig3 eigengaps")
    p.add_argument("--low-memory", action="store_true",
                   help=f"cap fig3 at n={experiments.FIG3_N_LOW_MEMORY}")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("estimate", help="iteration-count estimate "
                                        "n/ln(|eta-l1|/|eta-l2|)")
    p.add_argument("phi1", type=float)
    p.add_argument("phi2", type=float)
    p.add_argument("n", type=int)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--json", default=None)
    p.set_defaults(func=cmd_estimate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DeadBranchError as exc:
        print(f"dead branch: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except QPowerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
