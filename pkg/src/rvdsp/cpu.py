"""In-order RV32I + MUL-family interpreter with a per-class cycle cost model.

Instruction fetch is folded into the per-class costs (the table holds
fully loaded per-instruction cycles).  Loads and stores post word
transactions on the bus in their first cycle; sub-word accesses are
lane-extracted (loads) or byte-strobed (stores) so the bus only ever
sees word traffic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bits import s32, sext, u32
from .bus import BusTransaction, Requester, TxState
from .isa import IllegalInstructionError, cost_class, decode
from .memmap import DATA_BASE, Region, decode_address

# ECALL scratch word: last word of DataMem, receives x17 (a7) on syscall halt
SYSCALL_ADDR = 0x0000_FFFC


@dataclass
class CycleCostTable:
    alu: int = 1
    mul: int = 1
    load: int = 3
    store: int = 3
    branch_taken: int = 2
    branch_not_taken: int = 1
    jump: int = 2
    system: int = 1

    def cycles(self, cls):
        return getattr(self, cls.value)


@dataclass
class Fault:
    kind: str
    pc: int
    detail: str = ""


@dataclass
class _PendingLoad:
    rd: int
    mnemonic: str
    lane: int


class Cpu:
    def __init__(self, rom, bus, costs=None, sram=None):
        self.rom = rom
        self.bus = bus
        self.sram = sram  # only for the ECALL scratch write
        self.costs = costs or CycleCostTable()
        self.regs = [0] * 32
        self.pc = 0
        self.halted = False
        self.fault = None
        self.retired = 0
        self.cycles = 0
        self.stall_cycles = 0
        self.config_write_cycles = 0
        self._wait = 0
        self._tx = None
        self._load = None

    # register helpers keep the x0-is-zero invariant
    def _read(self, idx):
        return self.regs[idx] if idx else 0

    def _write(self, idx, value):
        if idx:
            self.regs[idx] = u32(value)

    def step(self):
        """Advance one cycle: issue a new instruction or burn a wait cycle."""
        if self.halted or self.fault is not None:
            return
        self.cycles += 1
        if self._tx is not None:
            self.stall_cycles += 1
            return
        if self._wait:
            self._wait -= 1
            return
        self._issue()

    def observe(self):
        """After the bus step: retire memory transactions, write back loads."""
        tx = self._tx
        if tx is None or tx.state is not TxState.DONE:
            return
        if tx.error is not None:
            self.fault = Fault("bus", self.pc, tx.error)
        elif self._load is not None:
            self._write(self._load.rd, _extract_lane(tx.rdata, self._load))
        self._tx = None
        self._load = None

    def _fault(self, kind, detail=""):
        self.fault = Fault(kind, self.pc, detail)

    def _issue(self):
        try:
            region, offset = decode_address(self.pc)
        except Exception:
            self._fault("fetch", f"misaligned pc 0x{self.pc:08x}")
            return
        if region is not Region.INST_MEM:
            self._fault("fetch", f"pc outside InstMem: 0x{self.pc:08x}")
            return
        word = self.rom.read_word(offset)
        try:
            instr = decode(word)
        except IllegalInstructionError as exc:
            self._fault("illegal", str(exc))
            return
        self.retired += 1
        taken = self._execute(instr)
        if self.fault is not None:
            return
        self._wait = self.costs.cycles(cost_class(instr, taken)) - 1

    def _execute(self, instr):
        m = instr.mnemonic
        rd, rs1, rs2, imm = instr.rd, instr.rs1, instr.rs2, instr.imm
        a = self._read(rs1)
        b = self._read(rs2)
        next_pc = u32(self.pc + 4)
        taken = False

        if m == "addi":
            self._write(rd, a + imm)
        elif m == "add":
            self._write(rd, a + b)
        elif m == "sub":
            self._write(rd, a - b)
        elif m == "slti":
            self._write(rd, int(s32(a) < imm))
        elif m == "sltiu":
            self._write(rd, int(a < u32(imm)))
        elif m == "slt":
            self._write(rd, int(s32(a) < s32(b)))
        elif m == "sltu":
            self._write(rd, int(a < b))
        elif m == "xori":
            self._write(rd, a ^ u32(imm))
        elif m == "ori":
            self._write(rd, a | u32(imm))
        elif m == "andi":
            self._write(rd, a & u32(imm))
        elif m == "xor":
            self._write(rd, a ^ b)
        elif m == "or":
            self._write(rd, a | b)
        elif m == "and":
            self._write(rd, a & b)
        elif m == "slli":
            self._write(rd, a << imm)
        elif m == "srli":
            self._write(rd, a >> imm)
        elif m == "srai":
            self._write(rd, s32(a) >> imm)
        elif m == "sll":
            self._write(rd, a << (b & 31))
        elif m == "srl":
            self._write(rd, a >> (b & 31))
        elif m == "sra":
            self._write(rd, s32(a) >> (b & 31))
        elif m == "lui":
            self._write(rd, imm)
        elif m == "auipc":
            self._write(rd, self.pc + imm)
        elif m == "mul":
            self._write(rd, s32(a) * s32(b))
        elif m == "mulh":
            self._write(rd, (s32(a) * s32(b)) >> 32)
        elif m == "mulhu":
            self._write(rd, (a * b) >> 32)
        elif m == "mulhsu":
            self._write(rd, (s32(a) * b) >> 32)
        elif m == "jal":
            self._write(rd, next_pc)
            next_pc = u32(self.pc + imm)
        elif m == "jalr":
            self._write(rd, next_pc)
            next_pc = u32(a + imm) & ~1
        elif m in ("beq", "bne", "blt", "bge", "bltu", "bgeu"):
            taken = _branch_taken(m, a, b)
            if taken:
                next_pc = u32(self.pc + imm)
        elif m in ("lb", "lh", "lw", "lbu", "lhu"):
            self._memory_op(m, rd, u32(a + imm), None)
        elif m in ("sb", "sh", "sw"):
            self._memory_op(m, rd, u32(a + imm), b)
        elif m == "fence":
            pass
        elif m == "ebreak":
            self.halted = True
        elif m == "ecall":
            if self.sram is not None:
                self.sram.write_word(SYSCALL_ADDR - DATA_BASE, self._read(17))
            self.halted = True
        else:  # pragma: no cover - decode only yields known mnemonics
            self._fault("illegal", m)
        if self.fault is None:
            self.pc = next_pc
        return taken

    def _memory_op(self, m, rd, addr, store_value):
        width = {"lb": 1, "lbu": 1, "lh": 2, "lhu": 2, "lw": 4,
                 "sb": 1, "sh": 2, "sw": 4}[m]
        if addr % width:
            self._fault("misaligned", f"{m} at 0x{addr:08x}")
            return
        word_addr = addr & ~3
        lane = addr & 3
        is_store = m[0] == "s"
        if is_store:
            if width == 4:
                wdata, wstrb = store_value, 0b1111
            elif width == 2:
                wdata = (store_value & 0xFFFF) << (8 * lane)
                wstrb = 0b0011 << lane
            else:
                wdata = (store_value & 0xFF) << (8 * lane)
                wstrb = 0b0001 << lane
            tx = BusTransaction(Requester.CPU, word_addr, write=True,
                                wdata=u32(wdata), wstrb=wstrb)
            region, _ = decode_address(word_addr)
            if region in (Region.CONV_REGS, Region.DOT_REGS):
                self.config_write_cycles += self.costs.store
        else:
            tx = BusTransaction(Requester.CPU, word_addr)
            self._load = _PendingLoad(rd, m, lane)
        self._tx = tx
        self.bus.post(tx)


def _branch_taken(m, a, b):
    if m == "beq":
        return a == b
    if m == "bne":
        return a != b
    if m == "blt":
        return s32(a) < s32(b)
    if m == "bge":
        return s32(a) >= s32(b)
    if m == "bltu":
        return a < b
    return a >= b  # bgeu


def _extract_lane(word, load):
    m, lane = load.mnemonic, load.lane
    if m == "lw":
        return word
    if m in ("lh", "lhu"):
        half = (word >> (8 * lane)) & 0xFFFF
        return sext(half, 16) if m == "lh" else half
    byte = (word >> (8 * lane)) & 0xFF
    return sext(byte, 8) if m == "lb" else byte
