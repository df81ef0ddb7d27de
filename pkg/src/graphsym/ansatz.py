"""Builders for the four circuit templates.

Parameter sharing realizes the symmetrization: every gate generated from
one group orbit binds the same slot, so a layer block acts as the
exponential of the summed orbit generators.  That factorization is legal
because each orbit used here is a mutually commuting family (single-letter
X or Y strings, or all-Z two-letter strings).

Default layer counts target the 120-parameter budget at 8 qubits:

    sn_invariant          3 slots/layer   40 layers -> 120
    cn_invariant          4 slots/layer   30 layers -> 120
    free_parameters      44 slots/layer    3 layers -> 132
    strongly_entangling  24 slots/layer    5 layers -> 120
"""

from __future__ import annotations

from dataclasses import dataclass

from .pauli import PauliString, SymmetryGroup, orbit
from .simulator import GateInstr

__all__ = [
    "CircuitIR",
    "ANSATZ_KINDS",
    "SN_INVARIANT",
    "CN_INVARIANT",
    "FREE_PARAMETERS",
    "STRONGLY_ENTANGLING",
    "build_sn",
    "build_cn",
    "build_free",
    "build_strongly_entangling",
    "build_ansatz",
    "DEFAULT_LAYERS",
]

SN_INVARIANT = "sn_invariant"
CN_INVARIANT = "cn_invariant"
FREE_PARAMETERS = "free_parameters"
STRONGLY_ENTANGLING = "strongly_entangling"

ANSATZ_KINDS = (SN_INVARIANT, CN_INVARIANT, FREE_PARAMETERS, STRONGLY_ENTANGLING)

DEFAULT_LAYERS = {
    SN_INVARIANT: 40,
    CN_INVARIANT: 30,
    FREE_PARAMETERS: 3,
    STRONGLY_ENTANGLING: 5,
}


@dataclass(frozen=True)
class CircuitIR:
    """Ordered gate list with parameter-slot bindings.

    ``layer_spans`` records the half-open slot range introduced by each
    layer, which the trainer uses for the block-diagonal metric option.
    """

    n_qubits: int
    gates: tuple[GateInstr, ...]
    n_params: int
    ansatz_kind: str
    layer_spans: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        used: set[int] = set()
        for g in self.gates:
            if any(q >= self.n_qubits for q in g.qubits):
                raise ValueError("gate targets qubit outside the register")
            if g.param_slot is not None:
                slots = range(g.param_slot, g.param_slot + g.n_slots)
                if slots.stop > self.n_params or g.param_slot < 0:
                    raise ValueError(
                        f"slot range {slots} exceeds n_params={self.n_params}"
                    )
                used.update(slots)
        if used != set(range(self.n_params)):
            raise ValueError("every parameter slot must be referenced")

    @property
    def n_layers(self) -> int:
        return len(self.layer_spans)

    def dump(self) -> str:
        """Debug text form, one gate per line."""
        lines = []
        for g in self.gates:
            qs = ",".join(str(q) for q in g.qubits)
            slot = "-" if g.param_slot is None else str(g.param_slot)
            lines.append(f"{g.kind} {qs} slot={slot} coeff={g.coefficient!r}")
        return "\n".join(lines)


def _single_site_targets(n: int, group: SymmetryGroup) -> list[int]:
    """Qubit indices from the orbit of a one-letter X string."""
    images = orbit(PauliString("X" + "I" * (n - 1)), group)
    return sorted(s.support()[0] for s in images.elements)


def _pair_targets(n: int, group: SymmetryGroup, generator: str) -> list[tuple[int, int]]:
    """Unordered qubit pairs from the orbit of a two-letter Z string."""
    images = orbit(PauliString(generator), group)
    return sorted(s.support() for s in images.elements)


def build_sn(n: int, layers: int = 40) -> CircuitIR:
    """Permutation-invariant template: shared RX, shared RY, shared all-pair RZZ.

    Three fresh slots per layer regardless of n; gates inside a block
    commute, so the fixed canonical ordering is a pure bookkeeping choice.
    """
    if n < 2:
        raise ValueError("permutation-invariant template needs n >= 2")
    group = SymmetryGroup.symmetric(n)
    sites = _single_site_targets(n, group)
    pairs = _pair_targets(n, group, "ZZ" + "I" * (n - 2))
    gates: list[GateInstr] = []
    spans = []
    for layer in range(layers):
        base = 3 * layer
        gates += [GateInstr("RX", (q,), base) for q in sites]
        gates += [GateInstr("RY", (q,), base + 1) for q in sites]
        gates += [GateInstr("RZZ", pair, base + 2) for pair in pairs]
        spans.append((base, base + 3))
    return CircuitIR(n, tuple(gates), 3 * layers, SN_INVARIANT, tuple(spans))


def build_cn(n: int, layers: int = 30) -> CircuitIR:
    """Cyclic-invariant template: rings of RX, RY and two RZZ distances.

    The distance-1 and distance-2 ring pairs are the C_n orbits of the two
    inequivalent adjacent-Z generators; orbits deduplicate, so n=4 has only
    two distance-2 pairs and n=3 reuses the distance-1 pairs.
    """
    if n < 3:
        raise ValueError("cyclic-invariant template needs n >= 3")
    group = SymmetryGroup.cyclic(n)
    sites = _single_site_targets(n, group)
    ring1 = _pair_targets(n, group, "ZZ" + "I" * (n - 2))
    ring2 = _pair_targets(n, group, "ZIZ" + "I" * (n - 3))
    gates: list[GateInstr] = []
    spans = []
    for layer in range(layers):
        base = 4 * layer
        gates += [GateInstr("RX", (q,), base) for q in sites]
        gates += [GateInstr("RY", (q,), base + 1) for q in sites]
        gates += [GateInstr("RZZ", pair, base + 2) for pair in ring1]
        gates += [GateInstr("RZZ", pair, base + 3) for pair in ring2]
        spans.append((base, base + 4))
    return CircuitIR(n, tuple(gates), 4 * layers, CN_INVARIANT, tuple(spans))


def build_free(n: int, layers: int = 3) -> CircuitIR:
    """Same gate arrangement as the permutation-invariant template, but every
    gate owns a fresh slot; the architecture baseline."""
    if n < 2:
        raise ValueError("free-parameter template needs n >= 2")
    group = SymmetryGroup.symmetric(n)
    sites = _single_site_targets(n, group)
    pairs = _pair_targets(n, group, "ZZ" + "I" * (n - 2))
    gates: list[GateInstr] = []
    spans = []
    slot = 0
    for _ in range(layers):
        start = slot
        for q in sites:
            gates.append(GateInstr("RX", (q,), slot))
            slot += 1
        for q in sites:
            gates.append(GateInstr("RY", (q,), slot))
            slot += 1
        for pair in pairs:
            gates.append(GateInstr("RZZ", pair, slot))
            slot += 1
        spans.append((start, slot))
    return CircuitIR(n, tuple(gates), slot, FREE_PARAMETERS, tuple(spans))


def build_strongly_entangling(n: int, layers: int = 5) -> CircuitIR:
    """Standard baseline: per-qubit three-angle rotations plus a CNOT ring.

    The ring range alternates 1, 2, 1, 2, ... across layers; control i
    targets (i + range) mod n.
    """
    if n < 3:
        raise ValueError("strongly entangling template needs n >= 3")
    gates: list[GateInstr] = []
    spans = []
    for layer in range(layers):
        base = 3 * n * layer
        for q in range(n):
            gates.append(GateInstr("ROT3", (q,), base + 3 * q))
        r = 1 if layer % 2 == 0 else 2
        for i in range(n):
            gates.append(GateInstr("CX", (i, (i + r) % n)))
        spans.append((base, base + 3 * n))
    return CircuitIR(n, tuple(gates), 3 * n * layers, STRONGLY_ENTANGLING, tuple(spans))


_BUILDERS = {
    SN_INVARIANT: build_sn,
    CN_INVARIANT: build_cn,
    FREE_PARAMETERS: build_free,
    STRONGLY_ENTANGLING: build_strongly_entangling,
}


def build_ansatz(kind: str, n: int, layers: int | None = None) -> CircuitIR:
    """Build any template by kind name, with its default layer count."""
    if kind not in _BUILDERS:
        raise ValueError(f"unknown ansatz kind {kind!r}; expected one of {ANSATZ_KINDS}")
    if layers is None:
        return _BUILDERS[kind](n)
    return _BUILDERS[kind](n, layers)
