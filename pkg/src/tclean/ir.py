"""Circuit intermediate representation.

A circuit is an ordered list of instructions over integer qubit ids and
classical bit ids.  Ancilla lifetimes are explicit: qubits either belong to a
declared input register (live for the whole circuit) or are created by an
``alloc0``/``alloct`` instruction and destroyed by ``release``.  Measurement
outcomes land in write-once classical bits, and Clifford instructions may be
conditioned on one of those bits (the measure-and-fixup idiom).

Contiguous instruction ranges can be tagged as AND-gadget spans.  The spans
are annotations only: simulation executes the instructions inside them
normally, while depth accounting collapses each span to a single unit-weight
event.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence


class Op(Enum):
    """Instruction alphabet (value doubles as the text-format mnemonic)."""

    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    RZ = "rz"
    CX = "cx"
    CZ = "cz"
    CCX = "ccx"
    ALLOC0 = "alloc0"
    ALLOCT = "alloct"
    RELEASE = "release"
    MZ = "mz"
    MX = "mx"


ARITY = {Op.CX: 2, Op.CZ: 2, Op.CCX: 3}
ARITY.update({op: 1 for op in Op if op not in ARITY})

#: T-count contributors: T, T-dagger, and injected |T> resource states.
T_FAMILY = frozenset({Op.T, Op.TDG, Op.ALLOCT})

#: Gates cheap in the surface code; the only kinds a classical condition may guard.
CLIFFORD_GATES = frozenset({Op.X, Op.Y, Op.Z, Op.H, Op.S, Op.SDG, Op.CX, Op.CZ})

#: Kinds that never change computational-basis values (phase-only).
DIAGONAL_GATES = frozenset({Op.Z, Op.S, Op.SDG, Op.T, Op.TDG, Op.RZ, Op.CZ})

MEASUREMENTS = frozenset({Op.MZ, Op.MX})


class GadgetTag(Enum):
    AND_COMPUTE = "and_compute"
    AND_UNCOMPUTE = "and_uncompute"


@dataclass(frozen=True)
class Instruction:
    """One gate, measurement, or allocation event.

    ``result`` names the classical bit written by a measurement; ``cond``
    names the classical bit guarding a conditioned Clifford.
    """

    op: Op
    qubits: tuple[int, ...]
    angle: float | None = None
    result: int | None = None
    cond: int | None = None

    def writes(self) -> frozenset[int]:
        """Qubits whose computational-basis value this instruction may change."""
        if self.op in DIAGONAL_GATES:
            return frozenset()
        if self.op is Op.CX:
            return frozenset({self.qubits[1]})
        if self.op is Op.CCX:
            return frozenset({self.qubits[2]})
        return frozenset(self.qubits)


@dataclass(frozen=True)
class GadgetSpan:
    """Half-open instruction range [start, end) tagged as one gadget."""

    start: int
    end: int
    tag: GadgetTag


@dataclass(frozen=True)
class Register:
    name: str
    qubits: tuple[int, ...]


@dataclass(frozen=True)
class Circuit:
    instructions: tuple[Instruction, ...]
    n_qubits: int
    n_classbits: int
    spans: tuple[GadgetSpan, ...] = ()
    inputs: tuple[Register, ...] = ()
    outputs: tuple[Register, ...] = ()

    def input_qubits(self) -> tuple[int, ...]:
        return tuple(q for reg in self.inputs for q in reg.qubits)

    def output_qubits(self) -> tuple[int, ...]:
        if self.outputs:
            return tuple(q for reg in self.outputs for q in reg.qubits)
        return self.input_qubits()

    def register(self, name: str) -> Register:
        for reg in self.inputs + self.outputs:
            if reg.name == name:
                return reg
        raise KeyError(name)

    def __len__(self) -> int:
        return len(self.instructions)


class ViolationCode(Enum):
    USE_AFTER_RELEASE = "USE_AFTER_RELEASE"
    USE_BEFORE_ALLOC = "USE_BEFORE_ALLOC"
    CLASSBIT_READ_BEFORE_WRITE = "CLASSBIT_READ_BEFORE_WRITE"
    BAD_ARITY = "BAD_ARITY"
    NONCLIFFORD_CONDITIONED = "NONCLIFFORD_CONDITIONED"
    OVERLAPPING_GADGET_SPANS = "OVERLAPPING_GADGET_SPANS"
    # Cases the canonical six do not cover.
    ALLOC_WHILE_LIVE = "ALLOC_WHILE_LIVE"
    CLASSBIT_REWRITE = "CLASSBIT_REWRITE"
    OUTPUT_NOT_LIVE = "OUTPUT_NOT_LIVE"
    REGISTER_OVERLAP = "REGISTER_OVERLAP"


@dataclass(frozen=True)
class Violation:
    code: ViolationCode
    index: int
    message: str


class CircuitError(Exception):
    """Raised when an invalid circuit is handed to an operation requiring validity."""

    def __init__(self, violation: Violation):
        self.violation = violation
        super().__init__(f"{violation.code.value} at instruction {violation.index}: {violation.message}")


def validate(circuit: Circuit) -> Violation | None:
    """Check every lifetime, arity, classical-bit, and span invariant.

    Returns the first violation in instruction order, or None if the circuit
    is valid.  Deterministic: depends only on the circuit contents.
    """
    n = len(circuit.instructions)
    for span in circuit.spans:
        if not (0 <= span.start < span.end <= n):
            return Violation(ViolationCode.OVERLAPPING_GADGET_SPANS, span.start,
                             f"span [{span.start},{span.end}) out of bounds")
    ordered = sorted(circuit.spans, key=lambda s: (s.start, -s.end))
    open_ends: list[int] = []
    for span in ordered:
        while open_ends and open_ends[-1] <= span.start:
            open_ends.pop()
        if open_ends and span.end > open_ends[-1]:
            return Violation(ViolationCode.OVERLAPPING_GADGET_SPANS, span.start,
                             f"span [{span.start},{span.end}) partially overlaps another span")
        open_ends.append(span.end)

    live: set[int] = set()
    ever_released: set[int] = set()
    for reg in circuit.inputs:
        for q in reg.qubits:
            if q in live:
                return Violation(ViolationCode.REGISTER_OVERLAP, 0,
                                 f"qubit {q} declared in two input registers")
            live.add(q)

    written_bits: set[int] = set()

    def liveness_error(q: int, i: int) -> Violation:
        if q in ever_released:
            return Violation(ViolationCode.USE_AFTER_RELEASE, i, f"qubit {q} used after release")
        return Violation(ViolationCode.USE_BEFORE_ALLOC, i, f"qubit {q} used before allocation")

    for i, instr in enumerate(circuit.instructions):
        if len(instr.qubits) != ARITY[instr.op] or len(set(instr.qubits)) != len(instr.qubits):
            return Violation(ViolationCode.BAD_ARITY, i,
                             f"{instr.op.value} expects {ARITY[instr.op]} distinct qubits, got {instr.qubits}")
        if any(q < 0 or q >= circuit.n_qubits for q in instr.qubits):
            return Violation(ViolationCode.BAD_ARITY, i, f"qubit index out of range in {instr.qubits}")
        if (instr.angle is not None) != (instr.op is Op.RZ):
            return Violation(ViolationCode.BAD_ARITY, i, "angle is required for rz and forbidden elsewhere")
        if (instr.result is not None) != (instr.op in MEASUREMENTS):
            return Violation(ViolationCode.BAD_ARITY, i, "result bit is required for measurements only")

        if instr.cond is not None:
            if instr.op not in CLIFFORD_GATES:
                return Violation(ViolationCode.NONCLIFFORD_CONDITIONED, i,
                                 f"conditioned {instr.op.value} is not a Clifford fixup")
            if instr.cond not in written_bits:
                return Violation(ViolationCode.CLASSBIT_READ_BEFORE_WRITE, i,
                                 f"classical bit c{instr.cond} read before any measurement wrote it")

        if instr.op in (Op.ALLOC0, Op.ALLOCT):
            q = instr.qubits[0]
            if q in live:
                return Violation(ViolationCode.ALLOC_WHILE_LIVE, i, f"qubit {q} allocated while live")
            live.add(q)
            ever_released.discard(q)
        elif instr.op is Op.RELEASE:
            q = instr.qubits[0]
            if q not in live:
                return liveness_error(q, i)
            live.discard(q)
            ever_released.add(q)
        else:
            for q in instr.qubits:
                if q not in live:
                    return liveness_error(q, i)
            if instr.op in MEASUREMENTS:
                bit = instr.result
                if bit is None or bit < 0 or bit >= circuit.n_classbits:
                    return Violation(ViolationCode.BAD_ARITY, i, f"classical bit {bit} out of range")
                if bit in written_bits:
                    return Violation(ViolationCode.CLASSBIT_REWRITE, i,
                                     f"classical bit c{bit} written twice")
                written_bits.add(bit)

    for q in circuit.output_qubits():
        if q not in live:
            return Violation(ViolationCode.OUTPUT_NOT_LIVE, n, f"declared output qubit {q} not live at end")
    return None


def require_valid(circuit: Circuit) -> Circuit:
    violation = validate(circuit)
    if violation is not None:
        raise CircuitError(violation)
    return circuit


class CircuitBuilder:
    """Single-owner builder; the built Circuit is immutable and freely shared.

    Qubit ids are handed out in declaration/allocation order, so ancilla
    lifetimes stay first-class for the cost model.
    """

    def __init__(self) -> None:
        self._instructions: list[Instruction] = []
        self._spans: list[GadgetSpan] = []
        self._inputs: list[Register] = []
        self._outputs: list[Register] = []
        self._next_qubit = 0
        self._next_bit = 0
        self._open_gadgets: list[tuple[int, GadgetTag]] = []

    # -- registers ----------------------------------------------------------

    def register(self, name: str, size: int) -> tuple[int, ...]:
        """Declare an input register of `size` fresh qubits, live from the start."""
        qubits = tuple(range(self._next_qubit, self._next_qubit + size))
        self._next_qubit += size
        self._inputs.append(Register(name, qubits))
        return qubits

    def adopt_register(self, name: str, qubits: Sequence[int]) -> tuple[int, ...]:
        """Declare an input register over caller-chosen qubit ids."""
        qubits = tuple(qubits)
        if qubits:
            self._next_qubit = max(self._next_qubit, max(qubits) + 1)
        self._inputs.append(Register(name, qubits))
        return qubits

    def output(self, name: str, qubits: Sequence[int]) -> None:
        self._outputs.append(Register(name, tuple(qubits)))

    # -- instructions --------------------------------------------------------

    def _emit(self, op: Op, qubits: tuple[int, ...], *, angle: float | None = None,
              result: int | None = None, cond: int | None = None) -> None:
        if qubits:
            self._next_qubit = max(self._next_qubit, max(qubits) + 1)
        self._instructions.append(Instruction(op, qubits, angle=angle, result=result, cond=cond))

    def _fresh_or(self, q: int | None) -> int:
        if q is None:
            q = self._next_qubit
        self._next_qubit = max(self._next_qubit, q + 1)
        return q

    def alloc0(self, q: int | None = None) -> int:
        q = self._fresh_or(q)
        self._emit(Op.ALLOC0, (q,))
        return q

    def alloct(self, q: int | None = None) -> int:
        q = self._fresh_or(q)
        self._emit(Op.ALLOCT, (q,))
        return q

    def release(self, q: int) -> None:
        self._emit(Op.RELEASE, (q,))

    def x(self, q: int, cond: int | None = None) -> None:
        self._emit(Op.X, (q,), cond=cond)

    def y(self, q: int, cond: int | None = None) -> None:
        self._emit(Op.Y, (q,), cond=cond)

    def z(self, q: int, cond: int | None = None) -> None:
        self._emit(Op.Z, (q,), cond=cond)

    def h(self, q: int, cond: int | None = None) -> None:
        self._emit(Op.H, (q,), cond=cond)

    def s(self, q: int, cond: int | None = None) -> None:
        self._emit(Op.S, (q,), cond=cond)

    def sdg(self, q: int, cond: int | None = None) -> None:
        self._emit(Op.SDG, (q,), cond=cond)

    def t(self, q: int) -> None:
        self._emit(Op.T, (q,))

    def tdg(self, q: int) -> None:
        self._emit(Op.TDG, (q,))

    def rz(self, angle: float, q: int) -> None:
        self._emit(Op.RZ, (q,), angle=float(angle))

    def cx(self, control: int, target: int, cond: int | None = None) -> None:
        self._emit(Op.CX, (control, target), cond=cond)

    def cz(self, a: int, b: int, cond: int | None = None) -> None:
        self._emit(Op.CZ, (a, b), cond=cond)

    def ccx(self, c1: int, c2: int, target: int) -> None:
        self._emit(Op.CCX, (c1, c2, target))

    def mz(self, q: int) -> int:
        bit = self._next_bit
        self._next_bit += 1
        self._emit(Op.MZ, (q,), result=bit)
        return bit

    def mx(self, q: int) -> int:
        bit = self._next_bit
        self._next_bit += 1
        self._emit(Op.MX, (q,), result=bit)
        return bit

    def append(self, instr: Instruction) -> None:
        """Append a prebuilt instruction, adopting any ids it references."""
        if instr.qubits:
            self._next_qubit = max(self._next_qubit, max(instr.qubits) + 1)
        for bit in (instr.result, instr.cond):
            if bit is not None:
                self._next_bit = max(self._next_bit, bit + 1)
        self._instructions.append(instr)

    def reserve_qubits(self, n: int) -> None:
        self._next_qubit = max(self._next_qubit, n)

    def reserve_classbits(self, n: int) -> None:
        self._next_bit = max(self._next_bit, n)

    def add_span(self, span: GadgetSpan) -> None:
        """Adopt a prebuilt span (absolute indices into this builder's list)."""
        self._spans.append(span)

    # -- gadget spans ---------------------------------------------------------

    def begin_gadget(self, tag: GadgetTag) -> None:
        self._open_gadgets.append((len(self._instructions), tag))

    def end_gadget(self) -> GadgetSpan:
        start, tag = self._open_gadgets.pop()
        span = GadgetSpan(start, len(self._instructions), tag)
        self._spans.append(span)
        return span

    # -- fragments ---------------------------------------------------------------

    @property
    def next_index(self) -> int:
        return len(self._instructions)

    def mark(self) -> tuple[int, int]:
        """Checkpoint for :meth:`fragment_since`."""
        return (len(self._instructions), len(self._spans))

    def fragment_since(self, mark: tuple[int, int]) -> tuple[tuple[Instruction, ...], tuple[GadgetSpan, ...]]:
        """Instructions appended since `mark`, with span indices rebased to 0."""
        i0, s0 = mark
        instrs = tuple(self._instructions[i0:])
        spans = tuple(GadgetSpan(s.start - i0, s.end - i0, s.tag) for s in self._spans[s0:])
        return instrs, spans

    # -- finish ----------------------------------------------------------------

    def build(self, check: bool = True) -> Circuit:
        if self._open_gadgets:
            raise ValueError("unclosed gadget span")
        circuit = Circuit(
            instructions=tuple(self._instructions),
            n_qubits=self._next_qubit,
            n_classbits=self._next_bit,
            spans=tuple(sorted(self._spans, key=lambda s: (s.start, s.end))),
            inputs=tuple(self._inputs),
            outputs=tuple(self._outputs),
        )
        if check:
            require_valid(circuit)
        return circuit


def concatenate(first: Circuit, second: Circuit) -> Circuit:
    """Sequential composition on a shared qubit index space.

    The second circuit's classical bits are renumbered to follow the first's.
    An input register of the second circuit is re-declared only when the
    first circuit never touches its qubits (disjoint composition); otherwise
    those qubits must already be live when the second circuit starts.
    Outputs are taken from the second circuit if declared, else the first.
    """
    offset = first.n_classbits

    def shift(instr: Instruction) -> Instruction:
        result = instr.result + offset if instr.result is not None else None
        cond = instr.cond + offset if instr.cond is not None else None
        return replace(instr, result=result, cond=cond)

    instrs = first.instructions + tuple(shift(i) for i in second.instructions)
    base = len(first.instructions)
    spans = first.spans + tuple(
        GadgetSpan(s.start + base, s.end + base, s.tag) for s in second.spans
    )
    touched = set(first.input_qubits())
    for instr in first.instructions:
        touched.update(instr.qubits)
    inputs = list(first.inputs)
    names = {reg.name for reg in inputs}
    for reg in second.inputs:
        if set(reg.qubits) & touched:
            continue
        name = reg.name
        while name in names:
            name += "'"
        names.add(name)
        inputs.append(Register(name, reg.qubits))
    return Circuit(
        instructions=instrs,
        n_qubits=max(first.n_qubits, second.n_qubits),
        n_classbits=first.n_classbits + second.n_classbits,
        spans=spans,
        inputs=tuple(inputs),
        outputs=second.outputs or first.outputs,
    )


def shift_qubits(circuit: Circuit, offset: int) -> Circuit:
    """Remap every qubit id by +offset, for composing independent circuits."""
    if offset < 0:
        raise ValueError("offset must be nonnegative")

    def shift_reg(reg: Register) -> Register:
        return Register(reg.name, tuple(q + offset for q in reg.qubits))

    return Circuit(
        instructions=tuple(replace(i, qubits=tuple(q + offset for q in i.qubits))
                           for i in circuit.instructions),
        n_qubits=circuit.n_qubits + offset,
        n_classbits=circuit.n_classbits,
        spans=circuit.spans,
        inputs=tuple(shift_reg(r) for r in circuit.inputs),
        outputs=tuple(shift_reg(r) for r in circuit.outputs),
    )
