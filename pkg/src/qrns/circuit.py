"""Gate-level IR for classical-reversible (permutation) circuits.

Every representable gate (X, CNOT, Toffoli) permutes computational basis
states, so a circuit here is always a bijection on bitstrings.  Qubit
indexing is 0-based and bit 0 of every register is the least significant
bit of the value it carries.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np


class GateKind(Enum):
    NOT = "x"
    CNOT = "cx"
    TOFFOLI = "ccx"


ARITY = {GateKind.NOT: 1, GateKind.CNOT: 2, GateKind.TOFFOLI: 3}

# Register tags.  A register may carry several: the sum register of an
# in-place adder is both "input" and "output"; "pass" marks registers the
# builder guarantees to leave bit-identical; "ancilla" registers must
# start in the all-zero state.
TAG_INPUT = "input"
TAG_OUTPUT = "output"
TAG_ANCILLA = "ancilla"
TAG_PASS = "pass"
VALID_TAGS = frozenset({TAG_INPUT, TAG_OUTPUT, TAG_ANCILLA, TAG_PASS})


@dataclass(frozen=True)
class Gate:
    """One reversible gate: controls first, target last."""

    kind: GateKind
    qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.qubits) != ARITY[self.kind]:
            raise ValueError(
                f"{self.kind.name} takes {ARITY[self.kind]} qubits, got {self.qubits}"
            )

    @property
    def target(self) -> int:
        return self.qubits[-1]

    @property
    def controls(self) -> tuple[int, ...]:
        return self.qubits[:-1]


def x(q: int) -> Gate:
    return Gate(GateKind.NOT, (q,))


def cx(control: int, target: int) -> Gate:
    return Gate(GateKind.CNOT, (control, target))


def ccx(c1: int, c2: int, target: int) -> Gate:
    return Gate(GateKind.TOFFOLI, (c1, c2, target))


@dataclass(frozen=True)
class Register:
    """Named, contiguous-or-not block of wires with role tags."""

    name: str
    qubits: tuple[int, ...]
    tags: frozenset[str] = frozenset({TAG_INPUT})

    def __post_init__(self) -> None:
        bad = self.tags - VALID_TAGS
        if bad:
            raise ValueError(f"unknown register tags {sorted(bad)}")

    @property
    def size(self) -> int:
        return len(self.qubits)


@dataclass(frozen=True)
class Circuit:
    """Immutable gate list over a fixed qubit count.

    ``name`` identifies the builder that produced the circuit and ``meta``
    carries its parameters (strings only, so circuits round-trip through
    the text format losslessly).
    """

    width: int
    gates: tuple[Gate, ...] = ()
    registers: tuple[Register, ...] = ()
    name: str = ""
    meta: Mapping[str, str] = field(default_factory=dict)

    def register(self, name: str) -> Register:
        for reg in self.registers:
            if reg.name == name:
                return reg
        raise KeyError(f"no register named {name!r}")

    def registers_tagged(self, tag: str) -> tuple[Register, ...]:
        return tuple(r for r in self.registers if tag in r.tags)


class CircuitValidationError(ValueError):
    """Raised when a circuit violates a structural invariant."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


def validate(circuit: Circuit) -> list[str]:
    """Return every violated invariant (empty list means the circuit is ok)."""
    errors: list[str] = []
    if circuit.width < 0:
        errors.append(f"negative width {circuit.width}")
    for i, gate in enumerate(circuit.gates):
        for q in gate.qubits:
            if not 0 <= q < circuit.width:
                errors.append(
                    f"gate {i} ({gate.kind.value}): qubit {q} out of range "
                    f"for width {circuit.width}"
                )
        if len(set(gate.qubits)) != len(gate.qubits):
            errors.append(
                f"gate {i} ({gate.kind.value}): duplicate qubit in {gate.qubits}"
            )
    seen: dict[int, str] = {}
    for reg in circuit.registers:
        for q in reg.qubits:
            if not 0 <= q < circuit.width:
                errors.append(f"register {reg.name}: qubit {q} out of range")
            elif q in seen:
                errors.append(
                    f"registers {seen[q]} and {reg.name} overlap on qubit {q}"
                )
            else:
                seen[q] = reg.name
    return errors


def assert_valid(circuit: Circuit) -> None:
    errors = validate(circuit)
    if errors:
        raise CircuitValidationError(errors)


def apply_permutation(circuit: Circuit, bits: str) -> str:
    """Apply the circuit to one basis state.

    ``bits[i]`` is qubit ``i``.  NOT flips its qubit, CNOT flips the target
    iff the control is 1, Toffoli iff both controls are 1.
    """
    if len(bits) != circuit.width:
        raise ValueError(f"expected {circuit.width} bits, got {len(bits)}")
    state = np.array([int(b) for b in bits], dtype=np.uint8)[np.newaxis, :]
    apply_permutation_batch(circuit, state)
    return "".join(str(int(b)) for b in state[0])


def apply_permutation_batch(circuit: Circuit, states: np.ndarray) -> np.ndarray:
    """Apply the circuit to many basis states in place.

    ``states`` is a (count, width) uint8 array of 0/1 values; column i is
    qubit i.  Returns the same array for convenience.
    """
    if states.ndim != 2 or states.shape[1] != circuit.width:
        raise ValueError(f"states must be (*, {circuit.width})")
    for gate in circuit.gates:
        q = gate.qubits
        if gate.kind is GateKind.NOT:
            states[:, q[0]] ^= 1
        elif gate.kind is GateKind.CNOT:
            states[:, q[1]] ^= states[:, q[0]]
        else:
            states[:, q[2]] ^= states[:, q[0]] & states[:, q[1]]
    return states


def pack_value(value: int, wires: Sequence[int], state: np.ndarray) -> None:
    """Write ``value`` little-endian onto ``wires`` of a (count, width) state."""
    for i, w in enumerate(wires):
        state[:, w] = (value >> i) & 1


def read_value(wires: Sequence[int], state: np.ndarray) -> np.ndarray:
    """Read the little-endian integer on ``wires`` from each row of ``state``."""
    out = np.zeros(state.shape[0], dtype=np.int64)
    for i, w in enumerate(wires):
        out |= state[:, w].astype(np.int64) << i
    return out


# --- text serialization -------------------------------------------------

_FORMAT_HEADER = "# qrns circuit v1"
_BIT_ORDER_NOTE = "# bit order: qubit i is position i of the state string (LSB first per register)"


def _span_text(qubits: tuple[int, ...]) -> str:
    spans: list[str] = []
    i = 0
    while i < len(qubits):
        j = i
        while j + 1 < len(qubits) and qubits[j + 1] == qubits[j] + 1:
            j += 1
        spans.append(f"{qubits[i]}..{qubits[j]}" if j > i else str(qubits[i]))
        i = j + 1
    return ",".join(spans)


def _parse_span(text: str) -> tuple[int, ...]:
    out: list[int] = []
    for part in text.split(","):
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return tuple(out)


def to_text(circuit: Circuit) -> str:
    lines = [_FORMAT_HEADER, _BIT_ORDER_NOTE]
    if circuit.name:
        lines.append(f"# circuit {circuit.name}")
    for key in sorted(circuit.meta):
        lines.append(f"# meta {key}={circuit.meta[key]}")
    lines.append(f"qubits {circuit.width}")
    for reg in circuit.registers:
        tags = ",".join(sorted(reg.tags))
        lines.append(f"reg {reg.name} {_span_text(reg.qubits)} {tags}")
    for gate in circuit.gates:
        lines.append(" ".join([gate.kind.value] + [str(q) for q in gate.qubits]))
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Circuit:
    width = -1
    name = ""
    meta: dict[str, str] = {}
    registers: list[Register] = []
    gates: list[Gate] = []
    kinds = {k.value: k for k in GateKind}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("circuit "):
                name = body[len("circuit "):].strip()
            elif body.startswith("meta "):
                key, _, value = body[len("meta "):].partition("=")
                meta[key.strip()] = value.strip()
            continue
        fields = line.split()
        if fields[0] == "qubits":
            width = int(fields[1])
        elif fields[0] == "reg":
            tags = frozenset(fields[3].split(",")) if len(fields) > 3 else frozenset()
            registers.append(Register(fields[1], _parse_span(fields[2]), tags))
        elif fields[0] in kinds:
            gates.append(Gate(kinds[fields[0]], tuple(int(q) for q in fields[1:])))
        else:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}")
    if width < 0:
        raise ValueError("missing 'qubits' header")
    circuit = Circuit(width, tuple(gates), tuple(registers), name, meta)
    assert_valid(circuit)
    return circuit
