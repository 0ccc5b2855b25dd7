from __future__ import annotations

from itertools import combinations

import numpy as np
import pytest
from oracles import gf2_rank, in_span, intersection_dim, symplectic_rows

from lscompile.codegen import color_instance, dump, merge_data, parse_dump, surface_instance, verify_merge, verify_merge_data
from lscompile.distance import SearchBoundExceeded, verify_distance
from lscompile.layouts import DOWN, UP
from lscompile.pauli import PauliOperator, product
from lscompile.surgery import MergeSpec, SurgeryError, build_subsystem_code, gauge_fix

INSTANCES = {
    "color-ZZ": lambda d: color_instance(d, "ZZ"),
    "color-XX": lambda d: color_instance(d, "XX"),
    "surface-ZZ": lambda d: surface_instance(d, "ZZ"),
    "surface-XX": lambda d: surface_instance(d, "XX"),
    "surface-snake2": lambda d: surface_instance(d, "ZZ", 2),
}


@pytest.fixture(scope="module", params=sorted(INSTANCES))
def data3(request):
    return merge_data(INSTANCES[request.param](3))


def test_commutation(data3):
    for ops in (data3.split, data3.merged):
        assert all(a.commutes(b) for a, b in combinations(ops, 2))


def test_stabilizer_group_is_intersection(data3):
    n = data3.n
    code = build_subsystem_code(data3.split, data3.merged, n)
    a, b = symplectic_rows(data3.split, n), symplectic_rows(data3.merged, n)
    s = symplectic_rows(code.stabilizers, n)
    assert gf2_rank(s) == len(code.stabilizers) == intersection_dim(a, b)
    assert all(in_span(a, row) and in_span(b, row) for row in s)


def test_intermediary_partners(data3):
    code = build_subsystem_code(data3.split, data3.merged, data3.n)
    assert code.intermediary
    assert len(code.partners) == len(code.intermediary)
    for op, j in zip(code.intermediary, code.partners):
        assert not op.commutes(data3.split[j])


def test_measurement_subset(data3):
    n = data3.n
    m = [data3.merged[i] for i in data3.m_indices]
    prod = product(m)
    assert prod == data3.target
    d = data3.header["d"]
    assert prod.weight == 2 * d
    assert prod.support <= set(data3.logical_qubits)
    # the target is a logical of the split code and a stabilizer of the merged code
    split_rows = symplectic_rows(data3.split, n)
    assert all(prod.commutes(s) for s in data3.split)
    target_row = symplectic_rows([prod], n)[0]
    assert not in_span(split_rows, target_row)
    assert in_span(symplectic_rows(data3.merged, n), target_row)
    # qubit-wise parity: logical support once, everything else even
    counts = np.zeros(n, dtype=int)
    for op in m:
        counts[list(op.support)] += 1
    for q in range(n):
        assert counts[q] == 1 if q in prod.support else counts[q] % 2 == 0


def test_dressed_distance_bruteforce(data3):
    """No dressed logical of weight below 3, by enumeration against a dense-rank oracle."""
    n = data3.n
    code = build_subsystem_code(data3.split, data3.merged, n)
    stab = code.stabilizers
    gauge_rows = symplectic_rows(stab + code.gauge_generators, n)
    for w in (1, 2):
        for supp in combinations(range(n), w):
            for op in (PauliOperator.x(supp), PauliOperator.z(supp)):
                if all(op.commutes(s) for s in stab):
                    assert in_span(gauge_rows, symplectic_rows([op], n)[0]), op


def test_verify_suite_d3(data3):
    report = verify_merge_data(data3, 3)
    assert report.ok, report.lines()
    assert report.distance is not None and report.distance.exhaustive


@pytest.mark.parametrize("name", ["color-ZZ", "surface-ZZ"])
def test_verify_suite_d5_bounded(name):
    report = verify_merge(INSTANCES[name](5), max_enumeration=20_000)
    assert report.ok, report.lines()


def test_dump_roundtrip(data3):
    text = dump(data3)
    back = parse_dump(text)
    assert back.n == data3.n
    assert back.split == data3.split
    assert back.merged == data3.merged
    assert back.m_indices == data3.m_indices
    assert back.target == data3.target
    assert dump(back) == text


def test_mutated_dump_fails():
    data = merge_data(color_instance(3))
    q = min(data.merged[data.m_indices[0]].support)
    data.merged[data.m_indices[0]] = data.merged[data.m_indices[0]] * PauliOperator.z([q])
    assert not verify_merge_data(data, 3).ok


def test_weakened_merge_fails_distance():
    data = merge_data(color_instance(3))
    # drop all but one split generator: weight-1 logicals appear
    data.split = data.split[:1]
    data.merged = data.merged[:1]
    data.m_indices = []
    report = verify_merge_data(data, 3)
    assert not report.ok


def test_gauge_fix_roundtrip(data3):
    n = data3.n
    code = build_subsystem_code(data3.split, data3.merged, n)
    merged_fix = gauge_fix(code, "merge")
    assert gf2_rank(np.vstack([symplectic_rows(merged_fix, n), symplectic_rows(data3.merged, n)])) == gf2_rank(
        symplectic_rows(data3.merged, n)
    ) == gf2_rank(symplectic_rows(merged_fix, n))


def test_search_bound():
    code = build_subsystem_code(merge_data(color_instance(5)).split, merge_data(color_instance(5)).merged)
    with pytest.raises(SearchBoundExceeded):
        verify_distance(code, 5, max_enumeration=10, require_exhaustive=True)
    res = verify_distance(code, 5, max_enumeration=10, trials=50)
    assert res.ok and not res.exhaustive


@pytest.mark.parametrize(
    "kwargs",
    [
        {"substrate": "color", "d": 4, "left": (UP, 0, 0), "right": (UP, 1, 0), "snake": ((DOWN, 0, 0),)},
        {"substrate": "color", "d": 3, "left": (UP, 0, 0), "right": (UP, 1, 0), "snake": ()},
        {"substrate": "color", "d": 3, "left": (UP, 0, 0), "right": (UP, 5, 0), "snake": ((DOWN, 0, 0),)},
        {"substrate": "color", "d": 3, "left": (UP, 0, 0), "right": (UP, 1, 0), "snake": ((DOWN, 0, 0),),
         "basis": "YY"},
        {"substrate": "foo", "d": 3, "left": (UP, 0, 0), "right": (UP, 1, 0), "snake": ((DOWN, 0, 0),)},
    ],
)
def test_merge_spec_rejects(kwargs):
    with pytest.raises(SurgeryError):
        MergeSpec(**kwargs)
