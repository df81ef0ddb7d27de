"""Exact little-endian statevector simulation of the gate IR.

Amplitudes are indexed little-endian: qubit 0 is the least significant bit
of the basis index.  Parameterized gates implement

    exp(-i * pi * (coefficient * theta) / 2 * P)

for P in {X_q, Y_q, Z_q, Z_q Z_r}, so theta has period 4.  ROT3 is the
three-angle rotation RX, then RY, then RZ, consuming three consecutive
parameter slots.

Every applier accepts arrays with arbitrary leading batch axes and
amplitudes on the last axis; evaluating a circuit on a whole validation set
is a single pass.  Derivative states are exact forward-mode: for each gate
occurrence of a slot, the generator factor -i*pi*coeff/2 * P is inserted at
the gate's position and occurrences are summed (product rule for shared
parameters).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

import numpy as np

if TYPE_CHECKING:
    from .ansatz import CircuitIR
    from .graphs import Graph

__all__ = [
    "GateInstr",
    "GATE_KINDS",
    "PARAMETERIZED_KINDS",
    "prepare_graph_state",
    "prepare_graph_states",
    "apply_gate",
    "apply_circuit",
    "expectation_mean_z",
    "mean_z_weights",
    "derivative_states",
    "evolve_with_derivatives",
]

GATE_KINDS = ("H", "CZ", "CX", "RX", "RY", "RZ", "RZZ", "ROT3")
PARAMETERIZED_KINDS = frozenset({"RX", "RY", "RZ", "RZZ", "ROT3"})
_TWO_QUBIT_KINDS = frozenset({"CZ", "CX", "RZZ"})

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

# generator letter applied when differentiating each rotation kind
_GENERATOR_OF = {"RX": "X", "RY": "Y", "RZ": "Z", "RZZ": "ZZ"}


@dataclass(frozen=True)
class GateInstr:
    """One primitive gate: kind, target qubit(s), optional parameter slot.

    ``coefficient`` multiplies the bound parameter inside the exponent; for
    ROT3 the slot is the first of three consecutive slots.
    """

    kind: str
    qubits: tuple[int, ...]
    param_slot: int | None = None
    coefficient: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        expected = 2 if self.kind in _TWO_QUBIT_KINDS else 1
        if len(self.qubits) != expected:
            raise ValueError(f"{self.kind} takes {expected} qubit(s)")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("gate qubits must be distinct")
        if self.kind in PARAMETERIZED_KINDS:
            if self.param_slot is None:
                raise ValueError(f"{self.kind} requires a parameter slot")
        elif self.param_slot is not None:
            raise ValueError(f"{self.kind} does not take a parameter slot")

    @property
    def n_slots(self) -> int:
        if self.kind == "ROT3":
            return 3
        return 1 if self.kind in PARAMETERIZED_KINDS else 0


def _primitives(instr: GateInstr) -> Iterator[tuple[str, tuple[int, ...], int | None, float]]:
    """Expand an instruction into elementary (kind, qubits, slot, coeff) ops."""
    if instr.kind == "ROT3":
        s = instr.param_slot
        assert s is not None
        for offset, kind in enumerate(("RX", "RY", "RZ")):
            yield kind, instr.qubits, s + offset, instr.coefficient
    else:
        yield instr.kind, instr.qubits, instr.param_slot, instr.coefficient


@lru_cache(maxsize=None)
def _basis(n: int) -> np.ndarray:
    return np.arange(1 << n)


@lru_cache(maxsize=None)
def _flip_index(n: int, q: int) -> np.ndarray:
    return _basis(n) ^ (1 << q)


@lru_cache(maxsize=None)
def _bit_sign(n: int, q: int) -> np.ndarray:
    return 1.0 - 2.0 * ((_basis(n) >> q) & 1)


@lru_cache(maxsize=None)
def _y_coef(n: int, q: int) -> np.ndarray:
    # (Y psi)[b] = i * (2 b_q - 1) * psi[b ^ (1 << q)]
    return 1j * (2.0 * ((_basis(n) >> q) & 1) - 1.0)


@lru_cache(maxsize=None)
def _pair_parity(n: int, q: int, r: int) -> np.ndarray:
    # +1 where bits q and r agree, -1 where they differ
    return 1.0 - 2.0 * (((_basis(n) >> q) ^ (_basis(n) >> r)) & 1)


@lru_cache(maxsize=None)
def _cz_sign(n: int, q: int, r: int) -> np.ndarray:
    return 1.0 - 2.0 * ((_basis(n) >> q) & (_basis(n) >> r) & 1)


@lru_cache(maxsize=None)
def _cx_index(n: int, control: int, target: int) -> np.ndarray:
    b = _basis(n)
    return b ^ (((b >> control) & 1) << target)


@lru_cache(maxsize=None)
def mean_z_weights(n: int) -> np.ndarray:
    """Diagonal of (1/n) sum_i Z_i: (n - 2 popcount(b)) / n per basis state."""
    b = _basis(n)
    pop = np.zeros(1 << n, dtype=np.int64)
    for k in range(n):
        pop += (b >> k) & 1
    return (n - 2 * pop) / n


def _infer_n(state: np.ndarray) -> int:
    dim = state.shape[-1]
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ValueError(f"amplitude axis length {dim} is not a power of two")
    return n


def _apply_1q(arr: np.ndarray, n: int, q: int, u00, u01, u10, u11) -> None:
    shape = arr.shape
    view = arr.reshape(shape[:-1] + (1 << (n - 1 - q), 2, 1 << q))
    a = view[..., 0, :].copy()
    b = view[..., 1, :]
    view[..., 0, :] = u00 * a + u01 * b
    view[..., 1, :] = u10 * a + u11 * b


def _apply_diag_1q(arr: np.ndarray, n: int, q: int, d0, d1) -> None:
    shape = arr.shape
    view = arr.reshape(shape[:-1] + (1 << (n - 1 - q), 2, 1 << q))
    view[..., 0, :] *= d0
    view[..., 1, :] *= d1


def _apply_primitive(
    arr: np.ndarray, n: int, kind: str, qubits: tuple[int, ...], half: float | None
) -> None:
    """Apply one elementary gate in place; ``half`` is pi*coeff*theta/2."""
    if kind == "H":
        _apply_1q(arr, n, qubits[0], _INV_SQRT2, _INV_SQRT2, _INV_SQRT2, -_INV_SQRT2)
    elif kind == "RX":
        c, s = math.cos(half), math.sin(half)
        _apply_1q(arr, n, qubits[0], c, -1j * s, -1j * s, c)
    elif kind == "RY":
        c, s = math.cos(half), math.sin(half)
        _apply_1q(arr, n, qubits[0], c, -s, s, c)
    elif kind == "RZ":
        phase = complex(math.cos(half), -math.sin(half))
        _apply_diag_1q(arr, n, qubits[0], phase, phase.conjugate())
    elif kind == "RZZ":
        q, r = qubits
        arr *= np.exp(-1j * half * _pair_parity(n, q, r))
    elif kind == "CZ":
        q, r = qubits
        arr *= _cz_sign(n, q, r)
    elif kind == "CX":
        control, target = qubits
        arr[...] = arr[..., _cx_index(n, control, target)]
    else:  # pragma: no cover - guarded by GateInstr validation
        raise ValueError(f"unknown primitive {kind!r}")


def _apply_pauli(arr: np.ndarray, n: int, letter: str, qubits: tuple[int, ...]) -> np.ndarray:
    """Action of the rotation generator's Pauli factor; returns a new array."""
    if letter == "X":
        return arr[..., _flip_index(n, qubits[0])]
    if letter == "Y":
        return arr[..., _flip_index(n, qubits[0])] * _y_coef(n, qubits[0])
    if letter == "Z":
        return arr * _bit_sign(n, qubits[0])
    if letter == "ZZ":
        return arr * _pair_parity(n, qubits[0], qubits[1])
    raise ValueError(f"unknown generator {letter!r}")


def _resolve_half(
    params: Sequence[float] | None, slot: int | None, coeff: float, kind: str
) -> float:
    if params is None or slot is None or not 0 <= slot < len(params):
        raise ValueError(f"{kind} has no bound parameter for slot {slot}")
    return math.pi * coeff * float(params[slot]) / 2.0


def apply_gate(
    state: np.ndarray, instr: GateInstr, params: Sequence[float] | None = None
) -> np.ndarray:
    """Apply one instruction and return the new state (input left intact)."""
    out = np.array(state, dtype=complex, order="C")
    n = _infer_n(out)
    if any(q >= n for q in instr.qubits):
        raise ValueError(f"gate {instr.kind} targets qubit outside 0..{n - 1}")
    for kind, qubits, slot, coeff in _primitives(instr):
        half = (
            _resolve_half(params, slot, coeff, kind)
            if kind in PARAMETERIZED_KINDS
            else None
        )
        _apply_primitive(out, n, kind, qubits, half)
    return out


def apply_circuit(
    circuit: "CircuitIR", params: Sequence[float], state: np.ndarray
) -> np.ndarray:
    """Run the whole IR over a state (or batch of states on leading axes)."""
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.n_params,):
        raise ValueError(
            f"expected {circuit.n_params} parameters, got shape {params.shape}"
        )
    out = np.array(state, dtype=complex, order="C")
    n = _infer_n(out)
    if n != circuit.n_qubits:
        raise ValueError(f"state has {n} qubits, circuit wants {circuit.n_qubits}")
    for instr in circuit.gates:
        for kind, qubits, slot, coeff in _primitives(instr):
            half = (
                _resolve_half(params, slot, coeff, kind)
                if kind in PARAMETERIZED_KINDS
                else None
            )
            _apply_primitive(out, n, kind, qubits, half)
    return out


def evolve_with_derivatives(
    circuit: "CircuitIR", params: Sequence[float], state: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Final state plus the exact derivative states, one per parameter slot.

    Returns ``(psi, derivs)`` where ``derivs[j]`` has the shape of ``psi``
    and equals d psi / d theta_j.
    """
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.n_params,):
        raise ValueError(
            f"expected {circuit.n_params} parameters, got shape {params.shape}"
        )
    psi = np.array(state, dtype=complex, order="C")
    n = _infer_n(psi)
    if n != circuit.n_qubits:
        raise ValueError(f"state has {n} qubits, circuit wants {circuit.n_qubits}")
    derivs = np.zeros((circuit.n_params,) + psi.shape, dtype=complex)
    for instr in circuit.gates:
        for kind, qubits, slot, coeff in _primitives(instr):
            if kind in PARAMETERIZED_KINDS:
                half = _resolve_half(params, slot, coeff, kind)
                _apply_primitive(psi, n, kind, qubits, half)
                _apply_primitive(derivs, n, kind, qubits, half)
                # generator insertion; commutes with the gate it belongs to
                factor = -0.5j * math.pi * coeff
                derivs[slot] += factor * _apply_pauli(
                    psi, n, _GENERATOR_OF[kind], qubits
                )
            else:
                _apply_primitive(psi, n, kind, qubits, None)
                _apply_primitive(derivs, n, kind, qubits, None)
    return psi, derivs


def derivative_states(
    circuit: "CircuitIR", params: Sequence[float], state: np.ndarray
) -> np.ndarray:
    """Exact forward-mode derivative states d psi / d theta_j."""
    return evolve_with_derivatives(circuit, params, state)[1]


def prepare_graph_state(graph: "Graph", n_qubits: int | None = None) -> np.ndarray:
    """Graph state: Hadamard on every qubit, then CZ on every edge.

    The CZ product is realized as its exact diagonal: amplitude b flips sign
    once per edge whose two endpoint bits are both set.
    """
    if n_qubits is not None and n_qubits != graph.n:
        raise ValueError(f"graph has {graph.n} nodes, simulator wants {n_qubits}")
    n = graph.n
    amps = np.full(1 << n, 2.0 ** (-n / 2.0), dtype=complex)
    b = _basis(n)
    for i, j in graph.edges():
        amps[((b >> i) & (b >> j) & 1) == 1] *= -1.0
    return amps


def prepare_graph_states(graphs: Iterable["Graph"]) -> np.ndarray:
    """Stack graph states into a (num_graphs, 2^n) batch."""
    states = [prepare_graph_state(g) for g in graphs]
    if not states:
        raise ValueError("no graphs given")
    return np.stack(states)


def expectation_mean_z(state: np.ndarray):
    """Expectation of the mean magnetization (1/n) sum_i Z_i.

    Works on a single state or a batch; returns a float or an array of
    floats in [-1, 1].
    """
    state = np.asarray(state)
    n = _infer_n(state)
    values = (np.abs(state) ** 2) @ mean_z_weights(n)
    if values.ndim == 0:
        return float(values)
    return values
