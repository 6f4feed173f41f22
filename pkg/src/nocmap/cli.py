"""Command-line driver: ``nocmap {map,optimize,evaluate,compare,generate}``.

Exit codes: 0 success, 2 usage error, 3 unreadable or invalid input,
4 the application does not fit the mesh (or is too large for the mode).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from nocmap import benchio
from nocmap.core import Apcg, Mapping, Topology
from nocmap.errors import ApcgError, MappingError, ParseError, SizingError
from nocmap.heuristic import map_heuristic
from nocmap.metrics import EnergyParams, evaluate
from nocmap.search import exhaustive, random_mapping
from nocmap.swarm import SwarmConfig, run

log = logging.getLogger("nocmap")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_SIZING = 0, 2, 3, 4

MAPPERS = ("heuristic", "random", "exhaustive")
SWARMS = ("pso", "arpso", "qpso")
ALGORITHMS = MAPPERS + SWARMS + tuple("h" + s for s in SWARMS)


class InputError(Exception):
    pass


class _Usage(Exception):
    pass


# --- argument helpers --------------------------------------------------------

def parse_params(text: str) -> EnergyParams:
    keys = {"link": "e_link_bit", "switch": "e_switch_bit", "rho": "rho"}
    values = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, sep, raw = item.partition("=")
        if not sep or key not in keys:
            raise argparse.ArgumentTypeError(f"expected link=F,switch=F,rho=F, got {item!r}")
        try:
            values[keys[key]] = float(raw)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{key} must be a number, got {raw!r}") from None
    try:
        return EnergyParams(**values)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _range(cast):
    def parse(text):
        lo, sep, hi = text.partition(",")
        if not sep:
            raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}")
        return cast(lo), cast(hi)
    return parse


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _add_common(p):
    p.add_argument("input", help="task graph file")
    p.add_argument("--mesh", type=int, metavar="N",
                   help="mesh dimension (default: 3, grown until N^3 >= cores)")
    p.add_argument("--params", type=parse_params, default=EnergyParams(),
                   metavar="link=F,switch=F,rho=F", help="per-bit energies (pJ) and latency constant")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", type=Path, metavar="PATH")
    p.add_argument("--report", choices=("json", "csv"), default="json")


def _add_swarm(p):
    p.add_argument("--objective", choices=("energy", "cost"), default="energy")
    p.add_argument("--evals", type=int, help="fitness evaluations per simulation")
    p.add_argument("--swarm", type=int, help="swarm size")
    p.add_argument("--sims", type=int, help="independent simulations")
    p.add_argument("--ator", type=int, help="evaluations before repulsion (arpso only)")
    p.add_argument("--ch", type=float, help="fraction of the swarm moved by QA (qpso only)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nocmap", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("map", help="place cores with a deterministic mapper")
    _add_common(p)
    p.add_argument("--variant", choices=MAPPERS, default="heuristic")
    p.add_argument("--trace", type=Path, metavar="PATH", help="write the heuristic search trace")

    p = sub.add_parser("optimize", help="run a swarm optimizer")
    _add_common(p)
    _add_swarm(p)
    p.add_argument("--variant", choices=SWARMS, default="pso")
    p.add_argument("--hybrid", action="store_true", help="seed the swarm with the heuristic mapping")

    p = sub.add_parser("evaluate", help="metrics of a given mapping")
    _add_common(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--assignment", help="comma-separated tile index per core")
    group.add_argument("--mapping", type=Path, help="JSON from map or optimize ('assignment' or 'best_assignment')")

    p = sub.add_parser("compare", help="run several algorithms and report reductions")
    _add_common(p)
    _add_swarm(p)
    p.add_argument("--algorithms", default="random,heuristic",
                   help=f"comma-separated subset of {','.join(ALGORITHMS)}")
    p.add_argument("--baseline", help="algorithm the reductions are measured against "
                                      "(default: the first one)")

    p = sub.add_parser("generate", help="write a random or sample task graph")
    p.add_argument("--cores", type=int)
    p.add_argument("--density", type=float, default=0.1)
    p.add_argument("--volume", type=_range(int), default=(1, 1000), metavar="LO,HI")
    p.add_argument("--bandwidth", type=_range(float), default=(1.0, 100.0), metavar="LO,HI")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--name")
    p.add_argument("--sample", choices=sorted(benchio.SAMPLES))
    p.add_argument("--out", type=Path, metavar="PATH")
    return parser


# --- shared plumbing ---------------------------------------------------------

def _load(path: Path) -> Apcg:
    try:
        return benchio.read_apcg(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def _topology(args, apcg: Apcg) -> Topology:
    if args.mesh is None:
        return Topology.for_cores(apcg.num_cores)
    topo = Topology(args.mesh)
    if apcg.num_cores > topo.num_tiles:
        raise SizingError(
            f"{apcg.num_cores} cores do not fit on a {args.mesh}x{args.mesh}x{args.mesh} mesh"
        )
    return topo


def _swarm_config(args, variant: str, hybrid: bool) -> SwarmConfig:
    overrides = {"seed": args.seed, "seed_with_heuristic": hybrid}
    for flag, key in (("evals", "max_evals"), ("swarm", "swarm_size"), ("sims", "simulations"),
                      ("ator", "ator"), ("ch", "ch")):
        value = getattr(args, flag)
        if value is not None:
            overrides[key] = value
    return SwarmConfig.for_variant(variant, **overrides)


def _mapping_doc(apcg, topo, algorithm, mapping, params) -> dict:
    return {
        "schema": "noc-map/mapping/1",
        "apcg": apcg.name,
        "mesh": topo.n,
        "algorithm": algorithm,
        "assignment": list(mapping.assignment),
        "params": {"link": params.e_link_bit, "switch": params.e_switch_bit, "rho": params.rho},
        "metrics": evaluate(mapping, params).to_dict(),
    }


def _metrics_csv(doc: dict) -> str:
    m = doc["metrics"]
    return ("algorithm,total_energy,comm_cost,avg_latency\n"
            f"{doc['algorithm']},{m['total_energy']!r},{m['comm_cost']!r},{m['avg_latency']!r}\n")


def _emit(args, json_text: str, csv_text: str, summary: list[str]) -> None:
    text = csv_text if args.report == "csv" else json_text
    if args.out is None:
        sys.stdout.write(text)
        for line in summary:
            log.info(line)
    else:
        args.out.write_text(text, encoding="utf-8")
        print("\n".join(summary + [f"wrote {args.out}"]))


def _dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _metric_summary(name: str, metrics: dict) -> str:
    return (f"{name}: total_energy={metrics['total_energy']!r} pJ "
            f"comm_cost={metrics['comm_cost']!r} avg_latency={metrics['avg_latency']!r}")


def _simple_map(variant, apcg, topo, seed, params):
    if variant == "heuristic":
        return map_heuristic(apcg, topo)
    if variant == "random":
        return random_mapping(apcg, topo, np.random.default_rng(seed)), None
    return exhaustive(apcg, topo, "energy", params)[0], None


# --- subcommands -------------------------------------------------------------

def cmd_map(args) -> int:
    apcg = _load(args.input)
    topo = _topology(args, apcg)
    mapping, trace = _simple_map(args.variant, apcg, topo, args.seed, args.params)
    if args.trace is not None and trace is not None:
        args.trace.write_text(trace.to_json() + "\n", encoding="utf-8")
    doc = _mapping_doc(apcg, topo, args.variant, mapping, args.params)
    _emit(args, _dumps(doc), _metrics_csv(doc), [_metric_summary(args.variant, doc["metrics"])])
    return EXIT_OK


def cmd_optimize(args) -> int:
    apcg = _load(args.input)
    topo = _topology(args, apcg)
    config = _swarm_config(args, args.variant, args.hybrid)
    result = run(apcg, topo, config, args.objective, args.params)
    json_text = result.to_json() + "\n"
    csv_text = result.convergence_csv()
    name = ("h" if args.hybrid else "") + args.variant
    summary = [f"{name}: best {args.objective}={result.min_cost!r} "
               f"assignment={list(result.best_assignment)}"]
    _emit(args, json_text, csv_text, summary)
    if args.out is not None and args.report == "json":
        side = args.out.with_suffix(".convergence.csv")
        side.write_text(csv_text, encoding="utf-8")
        print(f"wrote {side}")
    return EXIT_OK


def _read_assignment(args) -> list[int]:
    if args.assignment is not None:
        try:
            return [int(t) for t in args.assignment.split(",") if t.strip()]
        except ValueError:
            raise InputError(f"bad --assignment {args.assignment!r}") from None
    try:
        doc = json.loads(args.mapping.read_text(encoding="utf-8"))
        key = "assignment" if "assignment" in doc else "best_assignment"
        return [int(t) for t in doc[key]]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read an assignment from {args.mapping}: {exc}") from None


def cmd_evaluate(args) -> int:
    apcg = _load(args.input)
    topo = _topology(args, apcg)
    try:
        mapping = Mapping(apcg, topo, tuple(_read_assignment(args)))
    except MappingError as exc:
        raise InputError(str(exc)) from None
    doc = _mapping_doc(apcg, topo, "given", mapping, args.params)
    _emit(args, _dumps(doc), _metrics_csv(doc), [_metric_summary("given", doc["metrics"])])
    return EXIT_OK


def cmd_compare(args) -> int:
    names = [s.strip() for s in args.algorithms.split(",") if s.strip()]
    unknown = [n for n in names if n not in ALGORITHMS]
    if unknown:
        raise _Usage(f"unknown algorithm(s) {unknown}; choose from {list(ALGORITHMS)}")
    if len(set(names)) != len(names):
        raise _Usage(f"algorithm listed twice in {names}")
    if args.baseline is not None and args.baseline not in names:
        raise _Usage(f"baseline {args.baseline!r} is not among {names}")
    apcg = _load(args.input)
    topo = _topology(args, apcg)
    entries = []
    for name in names:
        run_doc = None
        if name in MAPPERS:
            mapping, _ = _simple_map(name, apcg, topo, args.seed, args.params)
        else:
            hybrid = name.startswith("h")
            result = run(apcg, topo, _swarm_config(args, name.removeprefix("h"), hybrid),
                         args.objective, args.params)
            mapping = result.best_mapping
            run_doc = {
                "variant": result.config.variant,
                "hybrid": hybrid,
                "objective": result.objective,
                "min_cost": result.min_cost,
                "evaluations": sum(s.evaluations for s in result.simulations),
                "simulations": len(result.simulations),
            }
        entries.append(benchio.ReportEntry(name, evaluate(mapping, args.params),
                                           mapping.assignment, run_doc))
    json_text, csv_text = benchio.write_report(entries, args.baseline)
    doc = json.loads(json_text)
    summary = [_metric_summary(r["algorithm"], r) for r in doc["algorithms"]]
    summary += [f"{name} vs {doc['baseline']}: energy reduction {red['total_energy']!r}%"
                for name, red in doc["reductions"].items()]
    _emit(args, json_text, csv_text, summary)
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.sample is not None:
        apcg = benchio.sample(args.sample)
    elif args.cores is None:
        raise _Usage("generate needs --cores or --sample")
    else:
        try:
            spec = benchio.GenSpec(args.cores, args.density, args.volume, args.bandwidth,
                                   args.seed, name=args.name)
        except ValueError as exc:
            raise _Usage(str(exc)) from None
        apcg = benchio.generate(spec)
    text = benchio.write_apcg(apcg)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8")
        print(f"wrote {args.out} ({apcg.num_cores} cores, {len(apcg.arcs)} arcs)")
    return EXIT_OK


COMMANDS = {
    "map": cmd_map,
    "optimize": cmd_optimize,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
    "generate": cmd_generate,
}


def _check_flags(parser, args) -> None:
    if args.command == "optimize":
        variants = [args.variant]
    elif args.command == "compare":
        variants = [s.strip().removeprefix("h") for s in args.algorithms.split(",")]
    else:
        return
    if args.ator is not None and "arpso" not in variants:
        parser.error("--ator only applies to arpso")
    if args.ch is not None and "qpso" not in variants:
        parser.error("--ch only applies to qpso")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    _check_flags(parser, args)
    try:
        return COMMANDS[args.command](args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"nocmap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizingError as exc:
        print(f"nocmap: sizing error: {exc}", file=sys.stderr)
        return EXIT_SIZING
    except (InputError, ApcgError) as exc:
        print(f"nocmap: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        # invalid swarm settings such as --swarm 1 or --ch 2
        parser.print_usage(sys.stderr)
        print(f"nocmap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
