"""Builders for the four reversible adder families.

Families
--------
FULL             in-place ripple adder, n-bit inputs, (n+1)-bit sum
MOD_POW2         (A+B) mod 2^n, carry-free variant of FULL
MOD_POW2_MINUS1  (A+B) mod (2^n-1), end-around-carry, two adder stages
MOD_POW2_PLUS1   (A+B) mod (2^n+1) on diminished-1 encoded inputs

All builders are pure and exhaustively verified against the classical
modular oracle in the test suite.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator

import numpy as np

from .circuit import (
    TAG_ANCILLA,
    TAG_INPUT,
    TAG_OUTPUT,
    TAG_PASS,
    Circuit,
    Gate,
    Register,
    apply_permutation_batch,
    assert_valid,
    ccx,
    cx,
    pack_value,
    read_value,
    x,
)


class AdderFamily(Enum):
    FULL = "full"
    MOD_POW2 = "mod-pow2"
    MOD_POW2_MINUS1 = "mod-pow2-minus1"
    MOD_POW2_PLUS1 = "mod-pow2-plus1"


def family_modulus(family: AdderFamily, n: int) -> int | None:
    if family is AdderFamily.FULL:
        return None
    if family is AdderFamily.MOD_POW2:
        return 2**n
    if family is AdderFamily.MOD_POW2_MINUS1:
        return 2**n - 1
    return 2**n + 1


# --- classical oracle and diminished-1 codec -----------------------------


def classical_mod_add(a: int, b: int, m: int) -> int:
    """Modular sum of two residues: a+b below m, 0 at m, reduced above."""
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    if not (0 <= a < m and 0 <= b < m):
        raise ValueError(f"inputs must lie in [0, {m}), got {a}, {b}")
    total = a + b
    if total < m:
        return total
    if total == m:
        return 0
    return total % m


@dataclass(frozen=True)
class Dim1Value:
    """Diminished-1 codeword for modulo (2^n + 1) arithmetic.

    Values 1..2^n are stored as value-1 on the low n bits; 0 is stored as
    2^n, i.e. only the MSB set.  The MSB therefore flags zero.
    """

    n: int
    bits: int

    @property
    def value(self) -> int:
        return 0 if self.bits >> self.n else self.bits + 1


def dim1_encode(value: int, n: int) -> Dim1Value:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 <= value <= 2**n:
        raise ValueError(f"value {value} outside [0, {2**n}]")
    bits = 2**n if value == 0 else value - 1
    return Dim1Value(n=n, bits=bits)


def dim1_decode(encoded: Dim1Value) -> int:
    if not (encoded.bits == 2**encoded.n or 0 <= encoded.bits < 2**encoded.n):
        raise ValueError(f"{encoded.bits:#x} is not a diminished-1 codeword")
    return encoded.value


def dim1_decode_bits(bits: int, n: int) -> int:
    return dim1_decode(Dim1Value(n=n, bits=bits))


# --- shared ripple-carry core --------------------------------------------


def _ripple_add(gates: list[Gate], xw: list[int], yw: list[int], z: int) -> None:
    """y <- (x+y) mod 2^n, z ^= carry-out; x is restored.

    Carries ripple transiently through the x register (prefix-CNOT trick),
    so no workspace beyond the carry-out wire is needed.
    """
    n = len(xw)
    if n == 1:
        gates.append(ccx(xw[0], yw[0], z))
        gates.append(cx(xw[0], yw[0]))
        return
    for i in range(1, n):
        gates.append(cx(xw[i], yw[i]))
    gates.append(cx(xw[n - 1], z))
    for i in range(n - 2, 0, -1):
        gates.append(cx(xw[i], xw[i + 1]))
    for i in range(n - 1):
        gates.append(ccx(xw[i], yw[i], xw[i + 1]))
    gates.append(ccx(xw[n - 1], yw[n - 1], z))
    for i in range(n - 1, 0, -1):
        gates.append(cx(xw[i], yw[i]))
        gates.append(ccx(xw[i - 1], yw[i - 1], xw[i]))
    for i in range(1, n - 1):
        gates.append(cx(xw[i], xw[i + 1]))
    for i in range(n):
        gates.append(cx(xw[i], yw[i]))


def _ripple_add_carryfree(gates: list[Gate], xw: list[int], yw: list[int]) -> None:
    """y <- (x+y) mod 2^n with x restored; no carry-out wire exists.

    Same skeleton as _ripple_add with every gate whose only effect is the
    carry-out deleted; the carry into the top bit is routed straight into
    y[n-1] instead of through x[n-1].
    """
    n = len(xw)
    if n == 1:
        gates.append(cx(xw[0], yw[0]))
        return
    if n == 2:
        gates.append(ccx(xw[0], yw[0], yw[1]))
        gates.append(cx(xw[1], yw[1]))
        gates.append(cx(xw[0], yw[0]))
        return
    for i in range(1, n - 1):
        gates.append(cx(xw[i], yw[i]))
    # y[n-1] collects a[n-1] xor b[n-1] xor a[n-2] up front; the Toffoli
    # below completes the carry term, using x[n-2] before it is dirtied.
    gates.append(cx(xw[n - 1], yw[n - 1]))
    gates.append(cx(xw[n - 2], yw[n - 1]))
    for i in range(n - 3, 0, -1):
        gates.append(cx(xw[i], xw[i + 1]))
    for i in range(n - 2):
        gates.append(ccx(xw[i], yw[i], xw[i + 1]))
    gates.append(ccx(xw[n - 2], yw[n - 2], yw[n - 1]))
    for i in range(n - 2, 0, -1):
        gates.append(cx(xw[i], yw[i]))
        gates.append(ccx(xw[i - 1], yw[i - 1], xw[i]))
    for i in range(1, n - 2):
        gates.append(cx(xw[i], xw[i + 1]))
    for i in range(n - 1):
        gates.append(cx(xw[i], yw[i]))


# --- builders -------------------------------------------------------------


def build_full_adder(n: int) -> Circuit:
    """n-bit + n-bit -> (n+1)-bit sum over 2n+1 qubits.

    B is replaced by the low sum bits, the extra qubit holds the carry-out,
    and A passes through unchanged.  There is no input-carry qubit.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    aw = list(range(n))
    bw = list(range(n, 2 * n))
    cout = 2 * n
    gates: list[Gate] = []
    _ripple_add(gates, aw, bw, cout)
    registers = (
        Register("A", tuple(aw), frozenset({TAG_INPUT, TAG_PASS})),
        Register("B", tuple(bw), frozenset({TAG_INPUT, TAG_OUTPUT})),
        Register("COUT", (cout,), frozenset({TAG_ANCILLA, TAG_OUTPUT})),
    )
    return Circuit(
        width=2 * n + 1,
        gates=tuple(gates),
        registers=registers,
        name="full",
        meta={"family": AdderFamily.FULL.value, "n": str(n)},
    )


def build_mod_pow2(n: int) -> Circuit:
    """(A+B) mod 2^n into B over 2n qubits; A passes through unchanged."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    aw = list(range(n))
    bw = list(range(n, 2 * n))
    gates: list[Gate] = []
    _ripple_add_carryfree(gates, aw, bw)
    registers = (
        Register("A", tuple(aw), frozenset({TAG_INPUT, TAG_PASS})),
        Register("B", tuple(bw), frozenset({TAG_INPUT, TAG_OUTPUT})),
    )
    return Circuit(
        width=2 * n,
        gates=tuple(gates),
        registers=registers,
        name="mod-pow2",
        meta={
            "family": AdderFamily.MOD_POW2.value,
            "n": str(n),
            "modulus": str(2**n),
        },
    )


def build_mod_pow2_minus1(n: int) -> Circuit:
    """(A+B) mod (2^n - 1) into B for inputs in [0, 2^n - 2].

    End-around carry: stage 1 adds A+B producing a carry, stage 2 runs a
    second adder stage folding the carry back in, and a final correction
    maps the all-ones word (the second representation of zero in one's
    complement) to zero.  The correction detects all-ones with a Toffoli
    chain, copies the flag, and uncomputes the chain so the detector
    ancillas end clean.  A passes through unchanged.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    aw = list(range(n))
    bw = list(range(n, 2 * n))
    carry = 2 * n
    zpad = list(range(2 * n + 1, 3 * n))  # high bits of the fold register, stay 0
    carry2 = 3 * n  # fold stage carry-out, provably 0 on legal inputs
    gw = list(range(3 * n + 1, 4 * n))
    flag = 4 * n
    gates: list[Gate] = []
    _ripple_add(gates, aw, bw, carry)
    _ripple_add(gates, [carry] + zpad, bw, carry2)
    chain = [ccx(bw[0], bw[1], gw[0])]
    chain += [ccx(gw[i - 2], bw[i], gw[i - 1]) for i in range(2, n)]
    gates.extend(chain)
    gates.append(cx(gw[n - 2], flag))
    gates.extend(reversed(chain))
    for i in range(n):
        gates.append(cx(flag, bw[i]))
    registers = (
        Register("A", tuple(aw), frozenset({TAG_INPUT, TAG_PASS})),
        Register("B", tuple(bw), frozenset({TAG_INPUT, TAG_OUTPUT})),
        Register("CARRY", (carry,), frozenset({TAG_ANCILLA})),
        Register("ZPAD", tuple(zpad), frozenset({TAG_ANCILLA})),
        Register("CARRY2", (carry2,), frozenset({TAG_ANCILLA})),
        Register("G", tuple(gw), frozenset({TAG_ANCILLA})),
        Register("FLAG", (flag,), frozenset({TAG_ANCILLA})),
    )
    return Circuit(
        width=4 * n + 1,
        gates=tuple(gates),
        registers=registers,
        name="mod-pow2-minus1",
        meta={
            "family": AdderFamily.MOD_POW2_MINUS1.value,
            "n": str(n),
            "modulus": str(2**n - 1),
        },
    )


def build_qdma(n: int) -> Circuit:
    """(A+B) mod (2^n + 1) on diminished-1 inputs of n+1 bits each.

    Three steps: (1) ripple-add the n low bits, keeping the carry-out live;
    (2) compute the partial product not(An)*not(Bn)*not(Carry) into a fresh
    qubit with two Toffolis and six NOTs; (3) a half-adder stage adds that
    bit into (An*Bn, S), producing the diminished-1 modulo sum.  B and the
    MSB of A pass through unchanged; the low bits of A end up holding the
    low output bits.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    aw = list(range(n + 1))  # aw[n] is the MSB flag
    bw = list(range(n + 1, 2 * n + 2))
    carry = 2 * n + 2
    tmp = 2 * n + 3
    pprod = 2 * n + 4
    ww = list(range(2 * n + 5, 3 * n + 4))
    mtop = 3 * n + 4
    gates: list[Gate] = []
    # Step 1: S = A_low + B_low with B restored; carries ripple through B.
    _ripple_add(gates, bw[:n], aw[:n], carry)
    # Step 2: partial product of the three inverted bits.
    for q in (aw[n], bw[n], carry):
        gates.append(x(q))
    gates.append(ccx(aw[n], bw[n], tmp))
    gates.append(ccx(tmp, carry, pprod))
    for q in (aw[n], bw[n], carry):
        gates.append(x(q))
    # Step 3: half-adder ripple of the partial product into (An*Bn, S).
    chain = [pprod] + ww + [mtop]
    for i in range(n):
        gates.append(ccx(aw[i], chain[i], chain[i + 1]))
    gates.append(ccx(aw[n], bw[n], mtop))
    for i in range(n):
        gates.append(cx(chain[i], aw[i]))
    registers = (
        Register("ALOW", tuple(aw[:n]), frozenset({TAG_INPUT, TAG_OUTPUT})),
        Register("AMSB", (aw[n],), frozenset({TAG_INPUT, TAG_PASS})),
        Register("B", tuple(bw), frozenset({TAG_INPUT, TAG_PASS})),
        Register("CARRY", (carry,), frozenset({TAG_ANCILLA})),
        Register("TMP", (tmp,), frozenset({TAG_ANCILLA})),
        Register("PPROD", (pprod,), frozenset({TAG_ANCILLA})),
    ) + (
        (Register("W", tuple(ww), frozenset({TAG_ANCILLA})),) if ww else ()
    ) + (
        Register("MTOP", (mtop,), frozenset({TAG_ANCILLA, TAG_OUTPUT})),
    )
    return Circuit(
        width=3 * n + 5,
        gates=tuple(gates),
        registers=registers,
        name="mod-pow2-plus1",
        meta={
            "family": AdderFamily.MOD_POW2_PLUS1.value,
            "n": str(n),
            "modulus": str(2**n + 1),
        },
    )


_BUILDERS = {
    AdderFamily.FULL: build_full_adder,
    AdderFamily.MOD_POW2: build_mod_pow2,
    AdderFamily.MOD_POW2_MINUS1: build_mod_pow2_minus1,
    AdderFamily.MOD_POW2_PLUS1: build_qdma,
}


def build_adder(family: AdderFamily, n: int) -> Circuit:
    return _BUILDERS[family](n)


def family_for_modulus(m: int, force_pow2m1_for_3: bool = False) -> tuple[AdderFamily, int]:
    """Map a modulus to its adder family; smallest n wins on ambiguity.

    3 is both 2^1+1 and 2^2-1; the 2^n+1 design wins by default because it
    uses fewer gates and less depth, but the 2^n-1 variant can be forced
    for comparison runs.
    """
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    if m == 3 and force_pow2m1_for_3:
        return AdderFamily.MOD_POW2_MINUS1, 2
    candidates: list[tuple[int, AdderFamily]] = []
    if m & (m - 1) == 0:
        candidates.append((m.bit_length() - 1, AdderFamily.MOD_POW2))
    if (m - 1) & (m - 2) == 0 and m - 1 >= 2:
        candidates.append(((m - 1).bit_length() - 1, AdderFamily.MOD_POW2_PLUS1))
    if m & (m + 1) == 0 and (m + 1).bit_length() - 1 >= 2:
        candidates.append(((m + 1).bit_length() - 1, AdderFamily.MOD_POW2_MINUS1))
    if not candidates:
        raise ValueError(f"{m} is not of the form 2^n, 2^n-1 or 2^n+1")
    n, family = min(candidates)
    return family, n


def build_for_modulus(m: int, force_pow2m1_for_3: bool = False) -> Circuit:
    family, n = family_for_modulus(m, force_pow2m1_for_3)
    return build_adder(family, n)


# --- instance harness ------------------------------------------------------


@dataclass(frozen=True)
class AdderInstance:
    """A built circuit plus the value-level semantics needed to drive it.

    Bridges integers to wires: packs (a, b) into the input registers
    (diminished-1 encoded for the 2^n+1 family), reads the measured output
    register, and supplies the classical expected value per input pair.
    """

    circuit: Circuit
    family: AdderFamily
    n: int

    @property
    def modulus(self) -> int | None:
        return family_modulus(self.family, self.n)

    @property
    def value_count(self) -> int:
        """Number of legal input values for each operand."""
        if self.family is AdderFamily.FULL:
            return 2**self.n
        if self.family is AdderFamily.MOD_POW2_MINUS1:
            return self.modulus  # residues 0..2^n-2
        if self.family is AdderFamily.MOD_POW2_PLUS1:
            return self.modulus  # values 0..2^n
        return self.modulus

    @property
    def a_wires(self) -> tuple[int, ...]:
        if self.family is AdderFamily.MOD_POW2_PLUS1:
            return self.circuit.register("ALOW").qubits + self.circuit.register("AMSB").qubits
        return self.circuit.register("A").qubits

    @property
    def b_wires(self) -> tuple[int, ...]:
        return self.circuit.register("B").qubits

    @property
    def output_wires(self) -> tuple[int, ...]:
        if self.family is AdderFamily.FULL:
            return self.circuit.register("B").qubits + self.circuit.register("COUT").qubits
        if self.family is AdderFamily.MOD_POW2_PLUS1:
            return self.circuit.register("ALOW").qubits + self.circuit.register("MTOP").qubits
        return self.circuit.register("B").qubits

    def encode_operand(self, value: int) -> int:
        if self.family is AdderFamily.MOD_POW2_PLUS1:
            return dim1_encode(value, self.n).bits
        return value

    def decode_output(self, bits: int) -> int:
        if self.family is AdderFamily.MOD_POW2_PLUS1:
            return dim1_decode_bits(bits, self.n)
        return bits

    def expected_output_bits(self, a: int, b: int) -> int:
        """Oracle value of the measured register for legal inputs a, b."""
        if self.family is AdderFamily.FULL:
            return a + b
        result = classical_mod_add(a, b, self.modulus)
        return self.encode_operand(result) if self.family is AdderFamily.MOD_POW2_PLUS1 else result

    def input_states(self, pairs: list[tuple[int, int]]) -> np.ndarray:
        states = np.zeros((len(pairs), self.circuit.width), dtype=np.uint8)
        for row, (a, b) in enumerate(pairs):
            one = states[row : row + 1]
            pack_value(self.encode_operand(a), self.a_wires, one)
            pack_value(self.encode_operand(b), self.b_wires, one)
        return states

    def legal_pairs(self) -> Iterator[tuple[int, int]]:
        count = self.value_count
        for a in range(count):
            for b in range(count):
                yield a, b

    def run_pairs(self, pairs: list[tuple[int, int]]) -> np.ndarray:
        """Noiseless measured-register values for each input pair."""
        states = self.input_states(pairs)
        apply_permutation_batch(self.circuit, states)
        return read_value(self.output_wires, states)


def adder_instance(circuit: Circuit) -> AdderInstance:
    """Rebuild the harness for a circuit produced by one of the builders."""
    assert_valid(circuit)
    try:
        family = AdderFamily(circuit.meta["family"])
        n = int(circuit.meta["n"])
    except KeyError as exc:
        raise ValueError("circuit lacks builder metadata (family, n)") from exc
    return AdderInstance(circuit=circuit, family=family, n=n)


def make_adder(family: AdderFamily, n: int) -> AdderInstance:
    return adder_instance(build_adder(family, n))
