"""Minimum weight of dressed logical operators of a subsystem code.

A dressed logical commutes with every stabilizer but is not an element of the gauge
group. For CSS codes the minimum is attained by a pure X or a pure Z operator, so each
type is searched separately over GF(2).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .pauli import PauliOperator, RowSpace, bits_of, nullspace, popcount, reduced_echelon
from .surgery import SubsystemCodeSpec

DEFAULT_MAX_ENUMERATION = 2_000_000
DEFAULT_TRIALS = 400


class SearchBoundExceeded(RuntimeError):
    """Raised when an exhaustive search was requested but is too large."""


@dataclass
class DistanceResult:
    """Outcome of a distance check.

    Attributes:
        ok: True iff no dressed logical of weight below the target was found.
        witness: A minimum-weight dressed logical found below the target, if any.
        min_weight: Smallest dressed-logical weight seen (``None`` if none below the
            searched bound).
        exhaustive: Whether the search covered all operators below the target weight.
    """

    ok: bool
    witness: PauliOperator | None
    min_weight: int | None
    exhaustive: bool

    def __bool__(self) -> bool:
        return self.ok


def _typed_part(vectors: list[int], n: int, kind: str) -> list[int]:
    """Basis of the pure-X (or pure-Z) elements of a row space, as n-bit vectors."""
    mask = (1 << n) - 1
    if kind == "X":
        rows = vectors
    else:
        rows = [(v >> n) | ((v & mask) << n) for v in vectors]
    piv = reduced_echelon(rows)
    return [r for h, r in piv.items() if h < n]


def _is_css(vectors: list[int], n: int) -> bool:
    return len(_typed_part(vectors, n, "X")) + len(_typed_part(vectors, n, "Z")) == RowSpace(vectors).rank


def _syndrome_table(checks: list[int], n: int) -> list[int]:
    cols = [0] * n
    for i, row in enumerate(checks):
        for q in bits_of(row):
            cols[q] |= 1 << i
    return cols


def _exhaustive(checks: list[int], gauge: RowSpace, n: int, below: int) -> tuple[int, int] | None:
    """Lowest-weight vector with zero syndrome outside the gauge span, weight < below."""
    cols = _syndrome_table(checks, n)
    by_syndrome: dict[int, list[int]] = {}
    for q, s in enumerate(cols):
        by_syndrome.setdefault(s, []).append(q)
    for w in range(1, below):
        for head in combinations(range(n), w - 1):
            s = 0
            v = 0
            for q in head:
                s ^= cols[q]
                v |= 1 << q
            last = head[-1] if head else -1
            for q in by_syndrome.get(s, ()):
                if q <= last:
                    continue
                cand = v | (1 << q)
                if not gauge.contains(cand):
                    return w, cand
    return None


def _sampled(checks: list[int], gauge: RowSpace, n: int, trials: int, seed: int) -> tuple[int, int] | None:
    """Information-set style search: kernel bases in random column orders."""
    rng = np.random.default_rng(seed)
    best: tuple[int, int] | None = None
    for _ in range(trials):
        perm = [int(x) for x in rng.permutation(n)]
        inv = {p: k for k, p in enumerate(perm)}
        permuted = [sum(1 << inv[q] for q in bits_of(r)) for r in checks]
        basis = nullspace(permuted, n)
        cands = list(basis)
        cands += [a ^ b for a, b in combinations(basis[: min(len(basis), 40)], 2)]
        for c in cands:
            v = sum(1 << perm[k] for k in bits_of(c))
            w = popcount(v)
            if (best is None or w < best[0]) and not gauge.contains(v):
                best = (w, v)
    return best


def verify_distance(
    code: SubsystemCodeSpec,
    d_target: int,
    max_enumeration: int = DEFAULT_MAX_ENUMERATION,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    require_exhaustive: bool = False,
) -> DistanceResult:
    """Check that no dressed logical of weight below ``d_target`` exists.

    The search is exhaustive when the number of enumerated operators stays below
    ``max_enumeration``; otherwise a seeded randomized search is run and the result is
    marked non-exhaustive.

    Raises:
        SearchBoundExceeded: If ``require_exhaustive`` is set and the instance is too large.
        ValueError: If the code is not CSS.
    """
    n = code.n
    s_bits = [p.to_bits(n) for p in code.stabilizers]
    g_bits = s_bits + [p.to_bits(n) for p in code.gauge_generators]
    if not (_is_css(s_bits, n) and _is_css(g_bits, n)):
        msg = "verify_distance supports CSS subsystem codes only."
        raise ValueError(msg)
    cost = sum(comb(n, w - 1) for w in range(1, d_target)) * 2
    exhaustive = cost <= max_enumeration
    if not exhaustive and require_exhaustive:
        msg = f"Exhaustive search below weight {d_target} on {n} qubits exceeds the bound."
        raise SearchBoundExceeded(msg)
    best: tuple[int, PauliOperator] | None = None
    for kind, other in (("Z", "X"), ("X", "Z")):
        checks = _typed_part(s_bits, n, other)
        gauge = RowSpace(_typed_part(g_bits, n, kind))
        found = _exhaustive(checks, gauge, n, d_target) if exhaustive else _sampled(checks, gauge, n, trials, seed)
        if found is None:
            continue
        w, v = found
        op = PauliOperator.z(bits_of(v)) if kind == "Z" else PauliOperator.x(bits_of(v))
        if best is None or w < best[0]:
            best = (w, op)
    if best is None:
        return DistanceResult(True, None, None, exhaustive)
    w, op = best
    if w < d_target:
        return DistanceResult(False, op, w, exhaustive)
    return DistanceResult(True, None, w, exhaustive)
