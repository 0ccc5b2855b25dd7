"""Pauli operators in the symplectic GF(2) representation and row-space algebra.

Vectors over GF(2) are stored as Python integers (bit ``i`` is coordinate ``i``), which
keeps elimination and popcounts fast for the few hundred qubits in scope. A Pauli on
``n`` qubits maps to the ``2n``-bit vector ``x | (z << n)``. Phases are dropped.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass


@dataclass(frozen=True)
class PauliOperator:
    """A phase-free Pauli operator given by its X and Z supports."""

    x_support: frozenset[int] = frozenset()
    z_support: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "x_support", frozenset(self.x_support))
        object.__setattr__(self, "z_support", frozenset(self.z_support))

    @classmethod
    def x(cls, qubits: Iterable[int]) -> PauliOperator:
        return cls(frozenset(qubits), frozenset())

    @classmethod
    def z(cls, qubits: Iterable[int]) -> PauliOperator:
        return cls(frozenset(), frozenset(qubits))

    @classmethod
    def from_bits(cls, v: int, n: int) -> PauliOperator:
        mask = (1 << n) - 1
        return cls(frozenset(bits_of(v & mask)), frozenset(bits_of(v >> n)))

    def to_bits(self, n: int) -> int:
        return support_to_int(self.x_support) | (support_to_int(self.z_support) << n)

    @property
    def support(self) -> frozenset[int]:
        return self.x_support | self.z_support

    @property
    def weight(self) -> int:
        return len(self.support)

    @property
    def is_x_type(self) -> bool:
        return not self.z_support

    @property
    def is_z_type(self) -> bool:
        return not self.x_support

    def commutes(self, other: PauliOperator) -> bool:
        overlap = len(self.x_support & other.z_support) + len(self.z_support & other.x_support)
        return overlap % 2 == 0

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return PauliOperator(self.x_support ^ other.x_support, self.z_support ^ other.z_support)

    def swap_xz(self) -> PauliOperator:
        return PauliOperator(self.z_support, self.x_support)

    def __str__(self) -> str:
        xs = " ".join(str(q) for q in sorted(self.x_support))
        zs = " ".join(str(q) for q in sorted(self.z_support))
        return f"X:{{{xs}}} Z:{{{zs}}}"


def support_to_int(qubits: Iterable[int]) -> int:
    v = 0
    for q in qubits:
        v |= 1 << q
    return v


def bits_of(v: int) -> list[int]:
    """Indices of the set bits of ``v`` in increasing order."""
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def popcount(v: int) -> int:
    return bin(v).count("1")


def symplectic(a: int, b: int, n: int) -> int:
    """Symplectic product of two ``2n``-bit Pauli vectors."""
    mask = (1 << n) - 1
    return popcount(((a & mask) & (b >> n)) ^ ((a >> n) & (b & mask))) & 1


def product(ops: Iterable[PauliOperator]) -> PauliOperator:
    x = z = 0
    for op in ops:
        x ^= support_to_int(op.x_support)
        z ^= support_to_int(op.z_support)
    return PauliOperator(frozenset(bits_of(x)), frozenset(bits_of(z)))


class RowSpace:
    """Incrementally reduced basis of a GF(2) row space.

    Each stored row also remembers which inserted vectors it combines, so membership
    queries can return an explicit decomposition.
    """

    def __init__(self, vectors: Iterable[int] = ()) -> None:
        self._pivots: dict[int, tuple[int, int]] = {}
        self._count = 0
        for v in vectors:
            self.add(v)

    def reduce(self, v: int) -> tuple[int, int]:
        """Return ``(residual, combination)`` with ``v = residual + sum(combination)``."""
        combo = 0
        while v:
            h = v.bit_length() - 1
            row = self._pivots.get(h)
            if row is None:
                break
            v ^= row[0]
            combo ^= row[1]
        if v:
            # clear lower pivots too so the residual is canonical
            rest = v
            v_high = 0
            while rest:
                h = rest.bit_length() - 1
                bit = 1 << h
                row = self._pivots.get(h)
                if row is not None:
                    rest ^= row[0]
                    combo ^= row[1]
                else:
                    v_high |= bit
                    rest ^= bit
            v = v_high
        return v, combo

    def add(self, v: int) -> bool:
        """Insert ``v``; return True if it enlarged the space."""
        index = self._count
        self._count += 1
        residual, combo = self.reduce(v)
        if not residual:
            return False
        self._pivots[residual.bit_length() - 1] = (residual, combo ^ (1 << index))
        return True

    def contains(self, v: int) -> bool:
        return not self.reduce(v)[0]

    def decompose(self, v: int) -> list[int] | None:
        """Indices of inserted vectors summing to ``v``, or None if ``v`` is outside."""
        residual, combo = self.reduce(v)
        if residual:
            return None
        return bits_of(combo)

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def basis(self) -> list[int]:
        return [self._pivots[h][0] for h in sorted(self._pivots, reverse=True)]


def rank(vectors: Iterable[int]) -> int:
    return RowSpace(vectors).rank


def same_span(a: Iterable[int], b: Iterable[int]) -> bool:
    a, b = list(a), list(b)
    sa = RowSpace(a)
    return sa.rank == rank(b) and all(sa.contains(v) for v in b)


def intersect(a: Sequence[int], b: Sequence[int], width: int) -> list[int]:
    """Basis of the intersection of two row spaces (Zassenhaus algorithm).

    Args:
        a: Generators of the first space.
        b: Generators of the second space.
        width: Bit width of the vectors.
    """
    rows = [(v << width) | v for v in a] + [v << width for v in b]
    space = RowSpace(rows)
    mask = (1 << width) - 1
    return [r & mask for r in space.basis() if r and not r >> width]


def kernel_combinations(syndromes: Sequence[int]) -> list[int]:
    """Basis of the bitmasks over the inputs whose syndromes XOR to zero."""
    pivots: dict[int, tuple[int, int]] = {}
    out = []
    for i, s in enumerate(syndromes):
        combo = 1 << i
        while s:
            h = s.bit_length() - 1
            row = pivots.get(h)
            if row is None:
                pivots[h] = (s, combo)
                break
            s ^= row[0]
            combo ^= row[1]
        if not s:
            out.append(combo)
    return out


def solve(rows: Sequence[int], target: int) -> int | None:
    """Bitmask of rows summing to ``target``, or None when no solution exists."""
    space = RowSpace(rows)
    combo = space.decompose(target)
    if combo is None:
        return None
    return support_to_int(combo)


def reduced_echelon(rows: Iterable[int]) -> dict[int, int]:
    """Fully reduced echelon form as ``{pivot bit: row}``."""
    piv: dict[int, int] = {}
    for v in rows:
        for h, r in piv.items():
            if v >> h & 1:
                v ^= r
        if not v:
            continue
        h = v.bit_length() - 1
        for k in piv:
            if piv[k] >> h & 1:
                piv[k] ^= v
        piv[h] = v
    return piv


def nullspace(rows: Iterable[int], width: int) -> list[int]:
    """Basis of ``{v : popcount(v & r) is even for every row r}``."""
    piv = reduced_echelon(rows)
    out = []
    for f in range(width):
        if f in piv:
            continue
        v = 1 << f
        for h, r in piv.items():
            if r >> f & 1:
                v |= 1 << h
        out.append(v)
    return out
