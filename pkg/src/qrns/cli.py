"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 infeasible selection,
3 simulation error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .adders import (
    AdderFamily,
    adder_instance,
    build_adder,
    build_for_modulus,
)
from .circuit import from_text, to_text
from .distributed import distributed_add
from .noise import (
    DEFAULT_NOISE,
    NoiseModel,
    calibrate_noise,
    output_probability,
    run_shots,
)
from .reference import MODULI_ROWS, deviation_flag, moduli_row
from .reports import ReportDocument, build_table1, build_table2, fmt_prob
from .resources import resource_report
from .rns import RnsSet, rns_range
from .select import (
    DepthSource,
    SelectionError,
    SelectorConfig,
    explain_selection,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_SIMULATION = 3

FAMILY_NAMES = {
    "full": AdderFamily.FULL,
    "mod-pow2": AdderFamily.MOD_POW2,
    "mod-pow2-minus1": AdderFamily.MOD_POW2_MINUS1,
    "mod-pow2-plus1": AdderFamily.MOD_POW2_PLUS1,
    "qdma": AdderFamily.MOD_POW2_PLUS1,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 1 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _noise_from_arg(spec: str) -> NoiseModel:
    if spec == "default":
        return DEFAULT_NOISE
    if spec == "zero":
        return NoiseModel.zero()
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"noise spec {spec!r} is neither default, zero, "
                         "nor an existing file")
    return NoiseModel.from_file(str(path))


def _print_resource_report(circuit, out=None) -> None:
    out = out if out is not None else sys.stdout
    report = resource_report(circuit)
    instance = adder_instance(circuit)
    ref = moduli_row(instance.modulus, instance.family) if instance.modulus else None
    print(f"qubits         {report.qubit_count}"
          + (deviation_flag(report.qubit_count, ref.qubits) if ref else ""), file=out)
    print(f"toffoli count  {report.toffoli_count}"
          + (deviation_flag(report.toffoli_count, ref.toffoli_count) if ref else ""), file=out)
    print(f"cnot count     {report.cnot_count}"
          + (deviation_flag(report.cnot_count, ref.cnot_count) if ref else ""), file=out)
    print(f"not count      {report.not_count}", file=out)
    print(f"toffoli depth  {report.toffoli_depth}"
          + (deviation_flag(report.toffoli_depth, ref.toffoli_depth) if ref else ""), file=out)
    print(f"cnot depth     {report.cnot_depth}"
          + (deviation_flag(report.cnot_depth, ref.cnot_depth) if ref else ""), file=out)
    print(f"total depth    {report.total_depth}", file=out)


def cmd_synth(args) -> int:
    family = FAMILY_NAMES[args.family]
    try:
        circuit = build_adder(family, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    text = to_text(circuit)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    _print_resource_report(circuit)
    return EXIT_OK


def cmd_select(args) -> int:
    try:
        cfg = SelectorConfig(
            k=args.k,
            count=args.count,
            efficiency=args.efficiency,
            max_n=args.max_n,
            depth_source=DepthSource(args.depth_source),
            force_pow2m1_for_3=args.force_minus1_for_3,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    trace = explain_selection(cfg)
    rns = RnsSet.from_moduli(trace.final_moduli, cfg.force_pow2m1_for_3)
    if args.json:
        payload = {
            "k": args.k,
            "efficiency": args.efficiency,
            "moduli": list(rns.moduli),
            "range": rns_range(rns),
            "trace": trace.events,
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"selected {rns} (range {rns_range(rns)})")
        if args.trace:
            for event in trace.events:
                print(f"  {event}")
    return EXIT_OK


def _resolve_run_target(spec: str):
    path = Path(spec)
    if path.exists():
        return adder_instance(from_text(path.read_text(encoding="utf-8")))
    if spec.startswith("mod:"):
        return adder_instance(build_for_modulus(int(spec.split(":", 1)[1])))
    if ":" in spec:
        name, _, n_text = spec.partition(":")
        if name in FAMILY_NAMES:
            return adder_instance(build_adder(FAMILY_NAMES[name], int(n_text)))
    raise UsageError(
        f"{spec!r} is neither a circuit file, 'mod:<modulus>', nor "
        f"'<family>:<n>' with family in {sorted(set(FAMILY_NAMES))}"
    )


def cmd_run(args) -> int:
    instance = _resolve_run_target(args.circuit)
    noise = _noise_from_arg(args.noise)
    if (args.a is None) != (args.b is None):
        raise UsageError("--a and --b must be given together")
    if args.a is not None:
        count = instance.value_count
        if not (0 <= args.a < count and 0 <= args.b < count):
            raise UsageError(f"operands must lie in [0, {count})")
        inputs = _operand_inputs(instance, args.a, args.b)
        histogram = run_shots(instance.circuit, inputs, args.shots, noise,
                              args.seed, instance.output_wires)
        expected = instance.expected_output_bits(args.a, args.b)
        rows = [(f"{bits:0{len(instance.output_wires)}b}", count_,
                 "expected" if bits == expected else "")
                for bits, count_ in sorted(histogram.items())]
        if args.json:
            print(json.dumps({
                "a": args.a, "b": args.b, "shots": args.shots, "seed": args.seed,
                "histogram": {row[0]: row[1] for row in rows},
                "expected": f"{expected:0{len(instance.output_wires)}b}",
            }, indent=2, sort_keys=True))
        else:
            for bits, count_, note in rows:
                print(f"{bits}  {count_:6d}  {note}".rstrip())
        return EXIT_OK
    sampling = int(args.sample) if args.sample.isdigit() else args.sample
    estimate = output_probability(instance, noise, shots=args.shots,
                                  seed=args.seed, sampling=sampling)
    if args.json:
        print(json.dumps({
            "circuit": args.circuit,
            "mean_probability": fmt_prob(estimate.mean),
            "pairs": len(estimate.per_pair),
            "shots": estimate.shots,
            "seed": estimate.seed,
            "stderr_bound": round(estimate.stderr_bound, 6),
        }, indent=2, sort_keys=True))
    else:
        print(f"mean output probability {estimate.mean:.3f} "
              f"({len(estimate.per_pair)} input pairs x {estimate.shots} shots, "
              f"per-pair stderr <= {estimate.stderr_bound:.4f})")
    return EXIT_OK


def _operand_inputs(instance, a: int, b: int) -> dict[str, int]:
    a_bits = instance.encode_operand(a)
    b_bits = instance.encode_operand(b)
    if instance.family is AdderFamily.MOD_POW2_PLUS1:
        return {"ALOW": a_bits % 2**instance.n, "AMSB": a_bits >> instance.n,
                "B": b_bits}
    return {"A": a_bits, "B": b_bits}


def cmd_dqc_add(args) -> int:
    cfg = SelectorConfig(k=args.k, efficiency=args.efficiency)
    trace = explain_selection(cfg)
    rns = RnsSet.from_moduli(trace.final_moduli)
    noise = _noise_from_arg(args.noise)
    result = distributed_add(args.a, args.b, rns, noise, shots=args.shots,
                             base_seed=args.seed, workers=args.workers)
    if args.json:
        payload = {
            "a": args.a, "b": args.b, "k": args.k,
            "moduli": list(rns.moduli),
            "jobs": [{
                "modulus": r.modulus,
                "top_value": r.top_value,
                "top_probability": fmt_prob(r.top_probability),
                "tie": r.tie,
            } for r in result.results],
            "reconstructed": result.reconstructed,
            "set_output_probability": fmt_prob(result.set_output_probability),
            "end_to_end_probability": fmt_prob(result.end_to_end_probability),
            "seed": args.seed,
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"moduli {rns}")
        for r in result.results:
            tie = "  (tie, took smaller value)" if r.tie else ""
            print(f"  mod {r.modulus}: top outcome {r.top_value} "
                  f"p={r.top_probability:.3f}{tie}")
        print(f"reconstructed sum {result.reconstructed}")
        print(f"set output probability {result.set_output_probability:.3f}")
        print(f"end-to-end probability {result.end_to_end_probability:.3f}")
    return EXIT_OK


def _parse_sizes(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",")]


def cmd_compare(args) -> int:
    noise = _noise_from_arg(args.noise)
    document = build_table2(
        sizes=_parse_sizes(args.sizes),
        efficiency=args.efficiency,
        noise=noise,
        seed=args.seed,
        budget=args.budget,
        depth_source=DepthSource(args.depth_source),
    )
    _emit(document, args)
    return EXIT_OK


def cmd_table1(args) -> int:
    noise = _noise_from_arg(args.noise)
    document = build_table1(noise, shots=args.shots, seed=args.seed)
    _emit(document, args)
    return EXIT_OK


def _emit(document: ReportDocument, args) -> None:
    if getattr(args, "csv", None):
        Path(args.csv).write_text(document.to_csv(), encoding="utf-8")
        print(f"wrote {args.csv}", file=sys.stderr)
    if getattr(args, "json", False):
        print(document.to_json())
    elif not getattr(args, "csv", None):
        print(document.to_text())


def cmd_calibrate(args) -> int:
    targets = []
    wanted = set(args.rows.split(",")) if args.rows else None
    for ref in MODULI_ROWS:
        label = f"{ref.modulus}:{ref.family.value}"
        # A bare modulus picks the default family tagging (3 -> 2^n+1).
        bare = str(ref.modulus) if label != "3:mod-pow2-minus1" else None
        if wanted is None or label in wanted or bare in wanted:
            targets.append((adder_instance(build_adder(ref.family, ref.n)),
                            ref.output_probability))
    result = calibrate_noise(targets, shots=args.shots, seed=args.seed,
                             max_rounds=args.rounds)
    model = result.model
    print(f"p_not     {model.p_not:.6f}")
    print(f"p_cnot    {model.p_cnot:.6f}")
    print(f"p_toffoli {model.p_toffoli:.6f}")
    print(f"residual  {result.residual:.6f} "
          f"({result.evaluations} evaluations, "
          f"{'converged' if result.converged else 'iteration cap reached'})")
    if args.out:
        model.to_file(args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="qrns", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="build an adder circuit and report resources")
    p.add_argument("family", choices=sorted(FAMILY_NAMES))
    p.add_argument("n", type=int)
    p.add_argument("--out", help="write the circuit text format here")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("select", help="choose a residue moduli set")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--efficiency", type=float, default=0.9)
    p.add_argument("--count", type=int, default=3)
    p.add_argument("--max-n", type=int, default=3, dest="max_n")
    p.add_argument("--depth-source", choices=["built", "paper"], default="paper")
    p.add_argument("--force-minus1-for-3", action="store_true")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("run", help="simulate a circuit under noise")
    p.add_argument("--circuit", required=True,
                   help="circuit file, '<family>:<n>', or 'mod:<modulus>'")
    p.add_argument("--shots", type=int, default=100)
    p.add_argument("--noise", default="default")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample", default="auto",
                   help="'auto', 'exhaustive', or a random pair count")
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("dqc-add", help="distributed addition via residue jobs")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--efficiency", type=float, default=0.9)
    p.add_argument("--noise", default="default")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shots", type=int, default=100)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_dqc_add)

    p = sub.add_parser("compare", help="monolithic vs distributed comparison")
    p.add_argument("--sizes", default="6..11", help="e.g. 6..11 or 6,8,10")
    p.add_argument("--efficiency", type=float, default=0.9)
    p.add_argument("--budget", type=int, default=20)
    p.add_argument("--noise", default="default")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth-source", choices=["built", "paper"], default="paper")
    p.add_argument("--csv", help="write rows to this CSV file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("table1", help="reference moduli-adder report")
    p.add_argument("--shots", type=int, default=100)
    p.add_argument("--noise", default="default")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="write rows to this CSV file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("calibrate", help="fit a noise model to reported values")
    p.add_argument("--rows", help="comma list like '2,8,9' or '3:mod-pow2-plus1'")
    p.add_argument("--shots", type=int, default=300)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--out", help="write the fitted model to this file")
    p.set_defaults(func=cmd_calibrate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qrns: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SelectionError as exc:
        print(f"qrns: infeasible selection: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, OverflowError, KeyError) as exc:
        print(f"qrns: simulation error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION


if __name__ == "__main__":
    sys.exit(main())
