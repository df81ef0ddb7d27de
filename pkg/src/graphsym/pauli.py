"""Pauli-string algebra and symmetry-group orbits.

A Pauli string is a word over {I, X, Y, Z} (one letter per qubit) together
with a global phase restricted to integer powers of i, so products and
commutation checks stay exact integer arithmetic with no float drift.
Letters are stored as a plain string; position 0 acts on qubit 0, which the
simulator maps to the least significant bit of the basis index.

Orbits of a generator string under the symmetric or cyclic group supply the
shared-parameter gate families used by the circuit builders.  Every orbit
used there consists of mutually commuting strings, which is what allows the
sum of generators to be exponentiated gate by gate instead of as one big
matrix exponential.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "PauliOp",
    "PauliString",
    "SymmetryGroup",
    "GeneratorOrbit",
    "multiply",
    "commutes",
    "is_mutually_commuting",
    "orbit",
]


class PauliOp(str, Enum):
    """Single-qubit Pauli letter; I is the multiplicative identity."""

    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"


_LETTERS = "IXYZ"

# (a, b) -> (letter of a*b, power of i picked up by the product)
_SINGLE_PRODUCT: dict[tuple[str, str], tuple[str, int]] = {}
for _a in _LETTERS:
    _SINGLE_PRODUCT[("I", _a)] = (_a, 0)
    _SINGLE_PRODUCT[(_a, "I")] = (_a, 0)
    _SINGLE_PRODUCT[(_a, _a)] = ("I", 0)
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _SINGLE_PRODUCT[(_a, _b)] = (_c, 1)  # sigma_a sigma_b = i sigma_c (cyclic)
    _SINGLE_PRODUCT[(_b, _a)] = (_c, 3)  # reversed order picks up -i

_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliString:
    """A phase-tagged Pauli word: (i ** phase_power) * letters[0] x letters[1] x ...

    ``letters`` is a string over IXYZ; ``phase_power`` is kept in {0, 1, 2, 3}.
    """

    letters: str
    phase_power: int = 0

    def __post_init__(self) -> None:
        if not self.letters or any(c not in _LETTERS for c in self.letters):
            raise ValueError(f"invalid Pauli letters: {self.letters!r}")
        object.__setattr__(self, "phase_power", int(self.phase_power) % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls("I" * n)

    @classmethod
    def from_text(cls, text: str) -> "PauliString":
        """Parse the text form, e.g. ``"ZZII"`` or ``"i^3*XY"``."""
        phase = 0
        if "*" in text:
            prefix, text = text.split("*", 1)
            if not prefix.startswith("i^"):
                raise ValueError(f"bad phase prefix: {prefix!r}")
            phase = int(prefix[2:])
        return cls(text, phase)

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def phase(self) -> complex:
        return 1j ** self.phase_power

    def support(self) -> tuple[int, ...]:
        """Positions carrying a non-identity letter."""
        return tuple(i for i, c in enumerate(self.letters) if c != "I")

    def permuted(self, perm: tuple[int, ...]) -> "PauliString":
        """Image under a node relabeling: the letter at i moves to perm[i]."""
        out = [""] * len(self.letters)
        for i, p in enumerate(perm):
            out[p] = self.letters[i]
        return PauliString("".join(out), self.phase_power)

    def to_matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix, qubit 0 on the least significant bit."""
        mat = np.ones((1, 1), dtype=complex)
        for letter in self.letters:
            mat = np.kron(_MATRICES[letter], mat)
        return self.phase * mat

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __str__(self) -> str:
        if self.phase_power == 0:
            return self.letters
        return f"i^{self.phase_power}*{self.letters}"


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Elementwise product of two Pauli strings with exact phase tracking."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    letters = []
    phase = a.phase_power + b.phase_power
    for la, lb in zip(a.letters, b.letters):
        letter, k = _SINGLE_PRODUCT[(la, lb)]
        letters.append(letter)
        phase += k
    return PauliString("".join(letters), phase % 4)


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff the matrices commute.

    Two Pauli strings commute exactly when the number of positions where the
    letters differ and neither is the identity is even.
    """
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    anti = sum(
        1
        for la, lb in zip(a.letters, b.letters)
        if la != "I" and lb != "I" and la != lb
    )
    return anti % 2 == 0


def is_mutually_commuting(strings: Iterable[PauliString]) -> bool:
    """True iff every pair in the collection commutes."""
    items = list(strings)
    return all(
        commutes(items[i], items[j])
        for i in range(len(items))
        for j in range(i + 1, len(items))
    )


@dataclass(frozen=True)
class SymmetryGroup:
    """A permutation group acting on qubit positions.

    ``kind`` is one of ``full_permutation`` (S_n), ``cyclic`` (C_n) or
    ``trivial``.  Group elements are permutation tuples ``perm`` mapping
    position i to ``perm[i]``.
    """

    kind: str
    n: int

    KINDS = ("full_permutation", "cyclic", "trivial")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown group kind: {self.kind!r}")
        if self.n < 1:
            raise ValueError("group degree must be positive")

    @classmethod
    def symmetric(cls, n: int) -> "SymmetryGroup":
        return cls("full_permutation", n)

    @classmethod
    def cyclic(cls, n: int) -> "SymmetryGroup":
        return cls("cyclic", n)

    @classmethod
    def trivial(cls, n: int) -> "SymmetryGroup":
        return cls("trivial", n)

    def order(self) -> int:
        if self.kind == "full_permutation":
            return math.factorial(self.n)
        if self.kind == "cyclic":
            return self.n
        return 1

    def elements(self) -> Iterator[tuple[int, ...]]:
        """All group elements; only sensible for small n."""
        if self.kind == "full_permutation":
            yield from itertools.permutations(range(self.n))
        elif self.kind == "cyclic":
            for k in range(self.n):
                yield tuple((i + k) % self.n for i in range(self.n))
        else:
            yield tuple(range(self.n))

    def generators(self) -> tuple[tuple[int, ...], ...]:
        """A generating set; orbits are closed under these alone."""
        n = self.n
        if n == 1 or self.kind == "trivial":
            return ()
        if self.kind == "full_permutation":
            gens = []
            for i in range(n - 1):
                perm = list(range(n))
                perm[i], perm[i + 1] = perm[i + 1], perm[i]
                gens.append(tuple(perm))
            return tuple(gens)
        return (tuple((i + 1) % n for i in range(n)),)


@dataclass(frozen=True)
class GeneratorOrbit:
    """The distinct images of a generator under a group, with multiplicity.

    ``multiplicity`` is group order divided by orbit size: how many group
    elements map the generator onto each particular image.
    """

    generator: PauliString
    group: SymmetryGroup
    elements: tuple[PauliString, ...]
    multiplicity: int

    def __len__(self) -> int:
        return len(self.elements)


def orbit(generator: PauliString, group: SymmetryGroup) -> GeneratorOrbit:
    """Distinct images of ``generator`` under the group, in lexicographic order.

    Closure is computed under the group's generating set, which reaches the
    full orbit without enumerating every group element.
    """
    if len(generator) != group.n:
        raise ValueError(
            f"generator length {len(generator)} != group degree {group.n}"
        )
    gens = group.generators()
    seen = {generator.letters}
    queue = [generator.letters]
    while queue:
        current = queue.pop()
        base = PauliString(current, generator.phase_power)
        for perm in gens:
            image = base.permuted(perm).letters
            if image not in seen:
                seen.add(image)
                queue.append(image)
    elements = tuple(
        PauliString(s, generator.phase_power) for s in sorted(seen)
    )
    order = group.order()
    # orbit-stabilizer: the orbit size always divides the group order
    assert order % len(elements) == 0
    return GeneratorOrbit(generator, group, elements, order // len(elements))
