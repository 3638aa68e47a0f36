"""Command-line entry point.

Subcommands:
  run     execute a scenario file, optionally writing a JSON report,
          memory dumps, and a trace
  model   evaluate the analytic cycle/speedup/latency formulas
  compare side-by-side analytic vs simulated comparison for the
          (N=1024, K=16) reference convolution
  asm     disassemble a hexwords program image

Exit codes: 0 ok, 2 config/usage error, 3 scenario validation error,
4 simulation fault, 5 timeout.
"""

from __future__ import annotations

import argparse
import sys

from .bits import s32, s64
from .isa import listing
from .memmap import (DATA_BASE, HexwordsError, INST_BASE, dump_hexwords,
                     parse_hexwords)
from .perfmodel import (CnnLayerShape, ConvWorkload, cnn_layer_cycles,
                        cnn_layer_macs, conv_speedup, dense_layer_macs,
                        dot_speedup, dsp_conv_cycles, dsp_dot_cycles,
                        dsp_dot_cycles_rounded, latency_seconds,
                        sw_conv_cycles, sw_dot_cycles, sw_dot_cycles_rounded)
from .scenario import Kind, Mode, Scenario, ScenarioError, load_scenario
from .scheduler import (SimConfig, SimulationFault, SimulationTimeout,
                        report_to_json, run_scenario, scenario_data)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_FAULT = 4
EXIT_TIMEOUT = 5


def _cmd_run(args):
    try:
        scenario = load_scenario(args.scenario)
    except (OSError, ScenarioError, HexwordsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION if isinstance(exc, ScenarioError) else EXIT_CONFIG

    trace_lines = [] if args.trace else None
    config = SimConfig(max_cycles=args.max_cycles,
                       trace=trace_lines.append if trace_lines is not None else None)
    try:
        report, world = run_scenario(scenario, config)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SimulationTimeout as exc:
        print(f"timeout: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT
    except SimulationFault as exc:
        print(f"fault: {exc}", file=sys.stderr)
        return EXIT_FAULT

    text = report_to_json(report)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write("\n".join(trace_lines) + "\n")
    if args.dump and world is not None:
        region, path = args.dump
        if region == "datamem":
            words, base = world.sram.words, DATA_BASE
        elif region == "instmem":
            words, base = world.rom.words, INST_BASE
        else:
            print(f"error: unknown dump region {region!r}", file=sys.stderr)
            return EXIT_CONFIG
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dump_hexwords(words, base))
    return EXIT_OK


def _cmd_model(args):
    freq = args.freq
    if args.model_kind == "conv":
        try:
            w = ConvWorkload(args.n, args.k)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        c_sw, c_dsp = sw_conv_cycles(w), dsp_conv_cycles(w)
        print(f"C_SW   = {c_sw}")
        print(f"C_DSP  = {c_dsp}  (incl. {10} config cycles)")
        print(f"speedup = {conv_speedup(w):.4f}")
        if freq:
            print(f"latency_sw  = {latency_seconds(c_sw, freq) * 1e3:.5f} ms")
            print(f"latency_dsp = {latency_seconds(c_dsp, freq) * 1e3:.5f} ms")
    elif args.model_kind == "dot":
        length = args.l
        print(f"sw_cycles  = {sw_dot_cycles(length)} "
              f"(per-element-only: {sw_dot_cycles_rounded(length)})")
        print(f"dsp_cycles = {dsp_dot_cycles(length)} "
              f"(per-element-only: {dsp_dot_cycles_rounded(length)})")
        print(f"speedup = {dot_speedup(length):.4f}")
        if freq:
            print(f"latency_sw  = {latency_seconds(sw_dot_cycles(length), freq) * 1e3:.5f} ms")
            print(f"latency_dsp = {latency_seconds(dsp_dot_cycles(length), freq) * 1e3:.5f} ms")
    elif args.model_kind == "cnn":
        try:
            shape = CnnLayerShape(args.n, args.k, args.c, args.k_out)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        sw, dsp = cnn_layer_cycles(shape)
        print(f"macs = {cnn_layer_macs(shape)}")
        print(f"sw_cycles  = {sw}")
        print(f"dsp_cycles = {dsp}")
        if freq:
            print(f"latency_sw  = {latency_seconds(sw, freq) * 1e3:.5f} ms")
            print(f"latency_dsp = {latency_seconds(dsp, freq) * 1e3:.5f} ms")
    else:  # dense
        macs = dense_layer_macs(args.in_features, args.out_features)
        print(f"macs = {macs}")
        print(f"sw_cycles  = {10 * macs}")
        print(f"dsp_cycles = {3 * macs}")
    return EXIT_OK


def _oracle_conv(x, h):
    outputs = len(x) - len(h) + 1
    out = []
    for i in range(outputs):
        acc = 0
        for j, coeff in enumerate(h):
            acc = s64(acc + s32(x[i + j]) * s32(coeff))
        out.append(acc & 0xFFFF_FFFF)
    return out


def _cmd_compare(args):
    n, k = 1024, args.k
    freq = args.freq
    try:
        w = ConvWorkload(n, k)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    c_sw = sw_conv_cycles(w)
    c_dsp = dsp_conv_cycles(w)
    busy_model = c_dsp - 10

    results = {}
    mismatches = []
    for mode in (Mode.TESTBENCH, Mode.FULL_SYSTEM):
        scenario = Scenario(kind=Kind.CONV, mode=mode, n=n, k=k, seed=7)
        try:
            report, world = run_scenario(scenario, SimConfig())
        except (SimulationTimeout, SimulationFault) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_TIMEOUT if isinstance(exc, SimulationTimeout) else EXIT_FAULT
        results[mode] = report
        if report["conv"]["busy_cycles"] != busy_model:
            mismatches.append(
                f"{mode.value}: busy {report['conv']['busy_cycles']} != model {busy_model}")
        x, h = scenario_data(scenario)
        if report["output"]["words"] != _oracle_conv(x, h):
            mismatches.append(f"{mode.value}: output differs from reference result")

    tb = results[Mode.TESTBENCH]
    fs = results[Mode.FULL_SYSTEM]
    print(f"Convolution comparison, N={n} K={k} ({w.outputs} outputs)")
    print(f"{'quantity':<34}{'software':>14}{'dsp':>14}")
    print(f"{'analytic cycles':<34}{c_sw:>14}{c_dsp:>14}")
    print(f"{'  (dsp = busy + 10 config)':<34}{'':>14}{busy_model:>10} + 10")
    print(f"{'simulated busy (testbench)':<34}{'-':>14}{tb['conv']['busy_cycles']:>14}")
    print(f"{'simulated busy (full-system)':<34}{'-':>14}{fs['conv']['busy_cycles']:>14}")
    print(f"{'measured config-write cycles':<34}{'-':>14}{fs['cpu']['config_write_cycles']:>14}")
    print(f"{'speedup (analytic)':<34}{conv_speedup(w):>28.4f}")
    if freq:
        lsw = latency_seconds(c_sw, freq)
        ldsp = latency_seconds(c_dsp, freq)
        print(f"{'latency @ freq':<34}{lsw * 1e3:>11.5f} ms{ldsp * 1e3:>11.5f} ms")
    if mismatches:
        for line in mismatches:
            print(f"MISMATCH: {line}")
        return EXIT_FAULT
    print("all simulated figures match the analytic model")
    return EXIT_OK


def _cmd_asm(args):
    try:
        with open(args.list, encoding="utf-8") as fh:
            pairs = parse_hexwords(fh.read())
    except (OSError, HexwordsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not pairs:
        return EXIT_OK
    base = pairs[0][0]
    words = [w for _, w in pairs]
    print(listing(words, base=base))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="sim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario file")
    p_run.add_argument("--scenario", required=True)
    p_run.add_argument("--report")
    p_run.add_argument("--dump", nargs=2, metavar=("REGION", "FILE"))
    p_run.add_argument("--trace")
    p_run.add_argument("--max-cycles", type=int, default=10_000_000)
    p_run.set_defaults(func=_cmd_run)

    p_model = sub.add_parser("model", help="analytic formulas only")
    model_sub = p_model.add_subparsers(dest="model_kind", required=True)
    m_conv = model_sub.add_parser("conv")
    m_conv.add_argument("--n", type=int, required=True)
    m_conv.add_argument("--k", type=int, required=True)
    m_dot = model_sub.add_parser("dot")
    m_dot.add_argument("--l", type=int, required=True)
    m_cnn = model_sub.add_parser("cnn")
    m_cnn.add_argument("--n", type=int, required=True)
    m_cnn.add_argument("--k", type=int, required=True)
    m_cnn.add_argument("--c", type=int, required=True)
    m_cnn.add_argument("--k-out", dest="k_out", type=int, required=True)
    m_dense = model_sub.add_parser("dense")
    m_dense.add_argument("--in-features", dest="in_features", type=int, required=True)
    m_dense.add_argument("--out-features", dest="out_features", type=int, required=True)
    for p in (m_conv, m_dot, m_cnn, m_dense):
        p.add_argument("--freq", type=float, default=None)
    p_model.set_defaults(func=_cmd_model)

    p_cmp = sub.add_parser("compare", help="reference comparison run")
    p_cmp.add_argument("--k", type=int, default=16)
    p_cmp.add_argument("--freq", type=float, default=None)
    p_cmp.set_defaults(func=_cmd_compare)

    p_asm = sub.add_parser("asm", help="disassemble a hexwords image")
    p_asm.add_argument("--list", required=True, metavar="PROGRAM")
    p_asm.set_defaults(func=_cmd_asm)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
