"""Global cycle loop and scenario execution.

Intra-cycle order is fixed for reproducibility: the CPU posts or
continues its transaction, then both DSP FSMs, then the bus arbitrates
and completes, and finally the CPU observes completions.  DSPs observe
bus completions at the start of their next step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .bits import u32
from .bus import Bus, BusTransaction, Requester
from .conv import ConvDsp, ConvState
from .cpu import Cpu, CycleCostTable
from .dotprod import DotDsp, DotState
from .mac import Truncation
from .memmap import CONV_BASE, DATA_BASE, DOT_BASE, Rom, Sram
from .perfmodel import (ConvWorkload, DEFAULT_C_CFG, cnn_layer_macs,
                        CnnLayerShape, conv_speedup, dense_layer_macs,
                        dsp_conv_cycles, dsp_dot_cycles, dot_speedup,
                        latency_seconds, sw_conv_cycles, sw_dot_cycles)
from .prng import SplitMix64
from .programs import conv_driver, conv_sw_kernel, dot_driver
from .scenario import Kind, Mode, Scenario

REPORT_SCHEMA_VERSION = 1


@dataclass
class SimConfig:
    costs: CycleCostTable = field(default_factory=CycleCostTable)
    truncation: Truncation = Truncation.WRAP
    max_cycles: int = 10_000_000
    freq_hz: float = 100e6
    trace: object = None  # callable(line: str) or None


class SimulationTimeout(Exception):
    pass


class SimulationFault(Exception):
    def __init__(self, fault):
        self.fault = fault
        super().__init__(f"{fault.kind} fault at pc=0x{fault.pc:08x}: {fault.detail}")


class World:
    """One self-contained simulator instance."""

    def __init__(self, config=None, with_cpu=False):
        self.config = config or SimConfig()
        self.cycle = 0
        trace = self._trace if self.config.trace else None
        self.rom = Rom()
        self.sram = Sram()
        self.conv = ConvDsp(truncation=self.config.truncation, trace=trace)
        self.dot = DotDsp(trace=trace)
        self.bus = Bus(self.rom, self.sram, self.conv, self.dot)
        self.cpu = Cpu(self.rom, self.bus, costs=self.config.costs,
                       sram=self.sram) if with_cpu else None

    def _trace(self, component, event):
        self.config.trace(f"cycle {self.cycle} | {component} | {event}")

    def step(self):
        self.cycle += 1
        if self.cycle > self.config.max_cycles:
            raise SimulationTimeout(f"exceeded {self.config.max_cycles} cycles")
        cpu = self.cpu
        if cpu is not None:
            cpu.step()
        self.conv.step()
        self.dot.step()
        self.bus.step()
        if cpu is not None:
            cpu.observe()

    def run_until(self, predicate):
        while not predicate():
            self.step()
            if self.cpu is not None and self.cpu.fault is not None:
                raise SimulationFault(self.cpu.fault)

    def run_until_halt(self):
        self.run_until(lambda: self.cpu.halted)

    # -------------------------------------------------------- host access
    def reg_write(self, addr, value):
        """Testbench-mode register write; advances one bus cycle."""
        tx = BusTransaction(Requester.CPU, addr, write=True, wdata=u32(value))
        self.bus.post(tx)
        self.step()
        if tx.error is not None:
            raise RuntimeError(tx.error)

    def reg_read(self, addr):
        tx = BusTransaction(Requester.CPU, addr)
        self.bus.post(tx)
        self.step()
        if tx.error is not None:
            raise RuntimeError(tx.error)
        return tx.rdata

    def write_words(self, byte_addr, words):
        """Host preload of DataMem (not cycle-counted)."""
        for i, w in enumerate(words):
            self.sram.write_word(byte_addr - DATA_BASE + 4 * i, w)

    def read_words(self, byte_addr, count):
        return [self.sram.read_word(byte_addr - DATA_BASE + 4 * i)
                for i in range(count)]


def scenario_data(scenario):
    """Deterministic signed test vectors for a scenario (splitmix64)."""
    rng = SplitMix64(scenario.seed)
    if scenario.kind is Kind.CONV:
        x = scenario.x_data if scenario.x_data is not None else rng.words(scenario.n)
        h = scenario.h_data if scenario.h_data is not None else rng.words(scenario.k)
        return [u32(v) for v in x], [u32(v) for v in h]
    if scenario.kind is Kind.DOT:
        a = scenario.x_data if scenario.x_data is not None else rng.words(scenario.length)
        b = scenario.h_data if scenario.h_data is not None else rng.words(scenario.length)
        return [u32(v) for v in a], [u32(v) for v in b]
    raise ValueError(f"no direct data for scenario kind {scenario.kind}")


def _bus_counters(world):
    return {
        "datamem_grants": {r.value: world.bus.grants[r] for r in Requester},
        "datamem_stalls": {r.value: world.bus.stalls[r] for r in Requester},
        "register_accesses": world.bus.register_accesses,
    }


def _dsp_counters(dsp):
    return {
        "busy_cycles": dsp.busy_cycles,
        "macs": dsp.macs,
        "done": dsp.status_done,
        "error": dsp.status_error,
        "irq": dsp.irq_line,
    }


def _cpu_counters(cpu):
    if cpu is None:
        return None
    return {
        "retired": cpu.retired,
        "cycles": cpu.cycles,
        "stall_cycles": cpu.stall_cycles,
        "config_write_cycles": cpu.config_write_cycles,
    }


def _base_report(scenario, world, status):
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "scenario": {
            "kind": scenario.kind.value,
            "mode": scenario.mode.value,
            "seed": scenario.seed,
            "name": scenario.name,
        },
        "status": status,
        "total_cycles": world.cycle,
        "cpu": _cpu_counters(world.cpu),
        "bus": _bus_counters(world),
        "conv": _dsp_counters(world.conv),
        "dot": _dsp_counters(world.dot),
    }


def _run_conv(scenario, config):
    world = World(config, with_cpu=scenario.mode is Mode.FULL_SYSTEM)
    x, h = scenario_data(scenario)
    world.write_words(scenario.in_addr, x)
    world.write_words(scenario.kern_addr, h)

    if scenario.mode is Mode.TESTBENCH:
        base = CONV_BASE
        from . import conv as regs

        world.reg_write(base + regs.OFF_IN_ADDR, scenario.in_addr)
        world.reg_write(base + regs.OFF_KERN_ADDR, scenario.kern_addr)
        world.reg_write(base + regs.OFF_OUT_ADDR, scenario.out_addr)
        world.reg_write(base + regs.OFF_IN_LEN, scenario.n)
        world.reg_write(base + regs.OFF_KERN_LEN, scenario.k)
        world.reg_write(base + regs.OFF_CONTROL, 1)
        world.run_until(lambda: world.conv.state is not ConvState.RUN)
    else:
        world.rom.load(conv_driver(scenario.n, scenario.k, scenario.in_addr,
                                   scenario.kern_addr, scenario.out_addr))
        world.run_until_halt()

    outputs = scenario.n - scenario.k + 1
    y = world.read_words(scenario.out_addr, outputs)
    report = _base_report(scenario, world, "ok")
    report["scenario"].update({"n": scenario.n, "k": scenario.k})
    w = ConvWorkload(scenario.n, scenario.k)
    report["model"] = {
        "sw_cycles": sw_conv_cycles(w),
        "dsp_cycles": dsp_conv_cycles(w),
        "c_cfg": DEFAULT_C_CFG,
        "speedup": conv_speedup(w),
    }
    report["derived"] = {
        "freq_hz": config.freq_hz,
        "latency_sw_s": latency_seconds(sw_conv_cycles(w), config.freq_hz),
        "latency_dsp_s": latency_seconds(dsp_conv_cycles(w), config.freq_hz),
    }
    report["output"] = {"addr": scenario.out_addr, "words": y}
    return report, world


def _run_dot(scenario, config):
    world = World(config, with_cpu=scenario.mode is Mode.FULL_SYSTEM)
    a, b = scenario_data(scenario)
    world.write_words(scenario.in_addr, a)
    world.write_words(scenario.kern_addr, b)

    if scenario.mode is Mode.TESTBENCH:
        from . import dotprod as regs

        base = DOT_BASE
        world.reg_write(base + regs.OFF_VA_ADDR, scenario.in_addr)
        world.reg_write(base + regs.OFF_VB_ADDR, scenario.kern_addr)
        world.reg_write(base + regs.OFF_LEN, scenario.length)
        world.reg_write(base + regs.OFF_CONTROL, 1)
        world.run_until(lambda: world.dot.state is not DotState.RUN)
    else:
        world.rom.load(dot_driver(scenario.length, scenario.in_addr,
                                  scenario.kern_addr))
        world.run_until_halt()

    report = _base_report(scenario, world, "ok")
    report["scenario"].update({"l": scenario.length})
    length = scenario.length
    report["model"] = {
        "sw_cycles": sw_dot_cycles(length),
        "dsp_cycles": dsp_dot_cycles(length),
        "sw_cycles_per_element_only": 10 * length,
        "dsp_cycles_per_element_only": 3 * length,
        "speedup": dot_speedup(length) if length else None,
    }
    report["derived"] = {
        "freq_hz": config.freq_hz,
        "latency_sw_s": latency_seconds(sw_dot_cycles(length), config.freq_hz),
        "latency_dsp_s": latency_seconds(dsp_dot_cycles(length), config.freq_hz),
    }
    report["result"] = {"lo": world.dot.result_lo, "hi": world.dot.result_hi}
    return report, world


def _run_cnn(scenario, config):
    """Decompose one CNN layer into C * K_out same-length conv calls.

    Each call convolves a zero-padded input of length N+K-1 so it yields
    N outputs and N*K MACs, matching the layer's N*K*C*K_out MAC count.
    """
    shape = CnnLayerShape(scenario.n, scenario.k, scenario.c, scenario.k_out)
    n_pad = shape.n + shape.k - 1
    in_addr = DATA_BASE
    kern_addr = in_addr + 4 * n_pad
    out_addr = kern_addr + 4 * shape.k
    total_busy = 0
    total_macs = 0
    total_cycles = 0
    calls = []
    for call in range(shape.c * shape.k_out):
        sub = Scenario(kind=Kind.CONV, mode=Mode.TESTBENCH, n=n_pad,
                       k=shape.k, seed=scenario.seed + call,
                       in_addr=in_addr, kern_addr=kern_addr, out_addr=out_addr)
        sub.validate()
        report, world = _run_conv(sub, config)
        total_busy += world.conv.busy_cycles
        total_macs += world.conv.macs
        total_cycles += world.cycle
        calls.append({"busy_cycles": world.conv.busy_cycles,
                      "macs": world.conv.macs})
    sw_cycles, dsp_cycles = (10 * cnn_layer_macs(shape), 3 * cnn_layer_macs(shape))
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "scenario": {"kind": "cnn", "mode": "testbench", "seed": scenario.seed,
                     "n": shape.n, "k": shape.k, "c": shape.c,
                     "k_out": shape.k_out, "name": scenario.name},
        "status": "ok",
        "calls": len(calls),
        "total_cycles": total_cycles,
        "conv": {"busy_cycles": total_busy, "macs": total_macs},
        "model": {"macs": cnn_layer_macs(shape), "sw_cycles": sw_cycles,
                  "dsp_cycles": dsp_cycles},
        "derived": {
            "freq_hz": config.freq_hz,
            "latency_sw_s": latency_seconds(sw_cycles, config.freq_hz),
            "latency_dsp_s": latency_seconds(dsp_cycles, config.freq_hz),
        },
    }, None


def _run_dense(scenario, config):
    """A dense layer is out_features dot products of length in_features."""
    va = DATA_BASE
    vb = va + 4 * scenario.in_features
    total_busy = 0
    total_macs = 0
    total_cycles = 0
    for call in range(scenario.out_features):
        sub = Scenario(kind=Kind.DOT, mode=Mode.TESTBENCH,
                       length=scenario.in_features,
                       seed=scenario.seed + call, in_addr=va, kern_addr=vb)
        sub.validate()
        report, world = _run_dot(sub, config)
        total_busy += world.dot.busy_cycles
        total_macs += world.dot.macs
        total_cycles += world.cycle
    macs = dense_layer_macs(scenario.in_features, scenario.out_features)
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "scenario": {"kind": "dense", "mode": "testbench",
                     "seed": scenario.seed,
                     "in_features": scenario.in_features,
                     "out_features": scenario.out_features,
                     "name": scenario.name},
        "status": "ok",
        "calls": scenario.out_features,
        "total_cycles": total_cycles,
        "dot": {"busy_cycles": total_busy, "macs": total_macs},
        "model": {"macs": macs, "sw_cycles": 10 * macs, "dsp_cycles": 3 * macs},
        "derived": {
            "freq_hz": config.freq_hz,
            "latency_sw_s": latency_seconds(10 * macs, config.freq_hz),
            "latency_dsp_s": latency_seconds(3 * macs, config.freq_hz),
        },
    }, None


def run_scenario(scenario, config=None):
    """Execute a scenario; returns (report dict, final World or None)."""
    config = config or SimConfig()
    scenario.validate()
    if scenario.kind is Kind.CONV:
        return _run_conv(scenario, config)
    if scenario.kind is Kind.DOT:
        return _run_dot(scenario, config)
    if scenario.kind is Kind.CNN_LAYER:
        return _run_cnn(scenario, config)
    return _run_dense(scenario, config)


def run_sw_conv_benchmark(n, k, seed=1, config=None,
                          in_addr=0x0000_8000, kern_addr=None, out_addr=None):
    """Run the generated software conv kernel; returns (report, world)."""
    config = config or SimConfig()
    if kern_addr is None:
        kern_addr = in_addr + 4 * n
    if out_addr is None:
        out_addr = kern_addr + 4 * k
    rng = SplitMix64(seed)
    x = rng.words(n)
    h = rng.words(k)
    world = World(config, with_cpu=True)
    world.rom.load(conv_sw_kernel(n, k, in_addr, kern_addr, out_addr))
    world.write_words(in_addr, x)
    world.write_words(kern_addr, h)
    world.run_until_halt()
    y = world.read_words(out_addr, n - k + 1)
    report = {
        "kind": "sw_conv",
        "n": n,
        "k": k,
        "cpu_cycles": world.cpu.cycles,
        "retired": world.cpu.retired,
        "model_sw_cycles": sw_conv_cycles(ConvWorkload(n, k)),
        "output": y,
    }
    return report, world


def report_to_json(report):
    return json.dumps(report, indent=2, sort_keys=True)
