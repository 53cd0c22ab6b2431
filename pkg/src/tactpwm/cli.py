"""Command-line front end: ``tactpwm {neuron,sweep,montecarlo,infer,energy}``.

Exit codes: 0 success, 1 runtime error, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from dataclasses import asdict

import numpy as np

from . import analysis, report
from .energy import inference_energy_report, make_report, neuron_energy
from .errors import ConfigError, DomainError, TactError
from .config import RunConfig, load_config
from .network import LayerSpec, NetworkSpec, build_layer, forward_network, load_weights
from .signal import encode_value

log = logging.getLogger("tactpwm")


class UsageError(Exception):
    """Bad invocation or configuration; maps to exit code 2."""


def _emit(record: dict, fmt: str, stream) -> None:
    if fmt == "json":
        stream.write(report.format_json(record))
    elif fmt == "csv":
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(record.keys())
        w.writerow(report._fmt(v) for v in record.values())
    else:
        stream.write(report.format_kv(record))


def _load(args) -> RunConfig:
    try:
        cfg = load_config(args.config)
    except TactError as exc:
        raise UsageError(str(exc)) from None
    return cfg.with_seed(args.seed) if args.seed is not None else cfg


def _read_vector(text: str) -> list[float]:
    values = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        values += [float(tok) for tok in line.replace(",", " ").split()]
    return values


def _inputs(args, n: int) -> list[float]:
    if args.inputs is None and args.inputs_file is None:
        return [0.0] * n
    try:
        if args.inputs_file is not None:
            with open(args.inputs_file) as fh:
                x = _read_vector(fh.read())
        else:
            x = _read_vector(args.inputs)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read inputs: {exc}") from None
    if len(x) != n:
        raise UsageError(f"expected {n} input values, got {len(x)}")
    return x


def cmd_neuron(args, out) -> int:
    cfg = _load(args)
    n = cfg.array.n_inputs
    x = _inputs(args, n)
    spec = LayerSpec(cfg.weight_matrix(1, n), cfg.neuron, cfg.device)
    layer = build_layer(spec, cfg.variation if cfg.variation.sigma_vth > 0 else None)
    _, trace = forward_network([layer], x, return_trace=True)
    o = trace[0][0]
    e_mac, e_vpc = neuron_energy(cfg.neuron, o, cfg.energy)
    rep = make_report(e_mac, e_vpc, 2 * n, cfg.array.freq)
    record = {
        "w_plus_s": o.w_plus, "w_minus_s": o.w_minus, "w_relu_s": o.w_relu,
        "v_mac_plus_v": o.rails[0].v_mac, "v_mac_minus_v": o.rails[1].v_mac,
        "saturated_plus": o.rails[0].saturated, "saturated_minus": o.rails[1].saturated,
        "output_norm": o.w_relu / cfg.frame.t_out,
    }
    record.update(rep.as_dict())
    _emit(record, args.format, out)
    return 0


def cmd_sweep(args, out) -> int:
    cfg = _load(args)
    if args.out is None:
        raise UsageError("sweep needs --out PATH for the CSV")
    n = cfg.array.n_inputs
    weights = cfg.weight_matrix(1, n)[0]
    points = analysis.sweep_input_output(
        cfg.setup(), cfg.experiment.sweep_points, weights, index=cfg.experiment.sweep_index,
        variation=cfg.variation, runs=cfg.experiment.averaging_runs, seed=cfg.experiment.seed)
    analysis.write_sweep_csv(points, args.out)
    _emit({"points": len(points), "offset_s": points[0][1], "full_scale_s": points[-1][1],
           "csv": str(args.out)}, args.format, out)
    return 0


def cmd_montecarlo(args, out) -> int:
    cfg = _load(args)
    stats = analysis.run_error_experiment(cfg.trial_config(), cfg.setup())
    if args.out is not None:
        analysis.write_trials_csv(stats, args.out)
    record = stats.summary()
    record["sigma_vth_v"] = cfg.variation.sigma_vth
    record["jitter_sigma_s"] = cfg.variation.jitter_sigma
    _emit(record, args.format, out)
    return 0


def cmd_infer(args, out) -> int:
    cfg = _load(args)
    try:
        matrices = [load_weights(p) for p in args.weights]
        with open(args.input) as fh:
            x = _read_vector(fh.read())
        net = NetworkSpec(tuple(LayerSpec(w, cfg.neuron, cfg.device) for w in matrices))
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    if len(x) != net.layers[0].n_inputs:
        raise UsageError(f"input has {len(x)} values, network expects {net.layers[0].n_inputs}")
    y = forward_network(net, x)
    if args.format == "json":
        out.write(report.format_json({"output": y}))
    elif args.format == "csv":
        out.write("index,output\n" + "".join(f"{i},{v!r}\n" for i, v in enumerate(y)))
    else:
        out.write("".join(f"{v!r}\n" for v in y))
    return 0


def cmd_energy(args, out) -> int:
    cfg = _load(args)
    a = cfg.array
    spec = LayerSpec(cfg.weight_matrix(), cfg.neuron, cfg.device)
    rep = inference_energy_report(NetworkSpec((spec,)), [a.input_level] * a.n_inputs,
                                  cfg.energy, freq=a.freq)
    record = rep.as_dict()
    record["efficiency_tops_per_w"] = rep.efficiency / 1e12
    _emit(record, args.format, out)
    return 0


COMMANDS = {"neuron": cmd_neuron, "sweep": cmd_sweep, "montecarlo": cmd_montecarlo,
            "infer": cmd_infer, "energy": cmd_energy}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run configuration file (defaults to the bundled calibration)")
    common.add_argument("--seed", type=int, help="override [experiment] seed")
    common.add_argument("--out", help="output file (CSV for sweep and montecarlo)")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")

    parser = argparse.ArgumentParser(prog="tactpwm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("neuron", parents=[common], help="evaluate one dual-rail neuron")
    p.add_argument("--inputs", help="normalized input values in [0, 1], space or comma separated")
    p.add_argument("--inputs-file", help="file of normalized input values")
    sub.add_parser("sweep", parents=[common], help="input/output sweep of one synapse to CSV")
    sub.add_parser("montecarlo", parents=[common], help="random-trial error statistics")
    p = sub.add_parser("infer", parents=[common], help="run a BinaryConnect network")
    p.add_argument("--weights", action="append", required=True,
                   help="weight file for one layer; repeat for deeper networks")
    p.add_argument("--input", required=True, help="file of normalized input values")
    sub.add_parser("energy", parents=[common], help="energy and efficiency of one array evaluation")
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
