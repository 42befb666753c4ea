from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import BRIDGE_PATHS, random_paths
from sigcore import (
    ArityMismatch,
    ModelError,
    NotSemicoherent,
    OrderStatisticFunction,
    PathSetSystem,
    StructureFunction,
    SubsetMask,
    bridge,
    evaluate,
    from_path_sets,
    is_semicoherent,
    k_out_of_n,
    minimal_path_sets,
    parallel,
    s_difference,
    series,
)
from sigcore._bits import expand_submasks, level_masks, mask_from_components
from sigcore.structure import enumerate_semicoherent


@st.composite
def path_systems(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return PathSetSystem.of(random_paths(n, np.random.default_rng(seed)), n)


def test_component_one_is_low_bit():
    assert SubsetMask.of([1], 3).bits == 1
    assert SubsetMask.of([3], 3).bits == 4
    assert SubsetMask.of([1, 3], 3).components == (1, 3)
    assert len(SubsetMask.of([2, 3], 3)) == 2


@pytest.mark.parametrize("labels", [[0], [4], [-1]])
def test_mask_rejects_labels_out_of_range(labels):
    with pytest.raises(ValueError):
        mask_from_components(labels, 3)


def test_bridge_values():
    phi = bridge()
    assert phi({1, 2}) == 0
    assert phi({1, 4}) == 1
    assert phi({3, 4, 5}) == 0
    assert phi({1, 3, 5}) == 1
    assert phi(0) == 0 and phi(31) == 1


def test_bridge_minimal_paths():
    got = minimal_path_sets(bridge()).as_components()
    assert sorted(map(tuple, got)) == sorted(map(tuple, BRIDGE_PATHS))


def test_evaluate_rejects_wrong_arity():
    phi = series(3)
    with pytest.raises(ArityMismatch):
        evaluate(phi, 8)
    with pytest.raises(ArityMismatch):
        evaluate(phi, SubsetMask(1, 4))


def test_k_out_of_n_tables():
    assert series(3).to_bits() == "00000001"
    assert parallel(3).to_bits() == "01111111"
    assert k_out_of_n(3, 2).to_bits() == "00010111"
    with pytest.raises(ModelError):
        k_out_of_n(3, 0)


def test_order_statistic_function():
    os2 = OrderStatisticFunction(4, 2)
    for m in range(16):
        assert os2(m) == int(m.bit_count() >= 3)
    assert not OrderStatisticFunction(4, 0).table().any()
    assert OrderStatisticFunction(4, 5).table().all()


def test_table_round_trip():
    phi = bridge()
    assert StructureFunction.from_bits(phi.to_bits()) == phi
    assert hash(StructureFunction.from_bits(phi.to_bits())) == hash(phi)


@pytest.mark.parametrize("bits", ["0", "011", "0121"])
def test_from_bits_rejects_bad_strings(bits):
    with pytest.raises(ModelError):
        StructureFunction.from_bits(bits)


def test_table_is_read_only():
    with pytest.raises(ValueError):
        series(2).table[0] = 1


def test_semicoherence_violations():
    assert not is_semicoherent(StructureFunction.from_bits("1111"))
    assert not is_semicoherent(StructureFunction.from_bits("0000"))
    report = is_semicoherent(StructureFunction.from_bits("0101" "0001"))
    assert not report and "monotone" in report.violation
    with pytest.raises(NotSemicoherent):
        minimal_path_sets(StructureFunction.from_bits("01010001"))


def test_path_sets_must_be_antichain():
    with pytest.raises(ModelError):
        PathSetSystem.of([[1], [1, 2]], 2)
    with pytest.raises(ModelError):
        PathSetSystem.of([[]], 2)


def test_semicoherent_count_small_n():
    # nontrivial monotone Boolean functions: Dedekind numbers minus the two constants
    assert [len(enumerate_semicoherent(n)) for n in (1, 2, 3, 4)] == [1, 4, 18, 166]


def test_every_n3_structure_is_generated_by_its_paths():
    for phi in enumerate_semicoherent(3):
        assert from_path_sets(minimal_path_sets(phi)) == phi


@settings(max_examples=60, deadline=None)
@given(path_systems())
def test_path_set_round_trip(ps):
    phi = from_path_sets(ps)
    assert is_semicoherent(phi)
    assert minimal_path_sets(phi) == ps


@settings(max_examples=40, deadline=None)
@given(path_systems(max_n=6))
def test_path_evaluation_matches_definition(ps):
    phi = from_path_sets(ps)
    for m in range(1 << ps.n):
        assert phi(m) == int(any(m & p == p for p in ps.paths))


def _naive_difference(f, n, s):
    out = []
    comps = [c - 1 for c in range(1, n + 1) if s >> (c - 1) & 1]
    for x in range(1 << n):
        base = x & ~s
        total = 0.0
        for r in range(len(comps) + 1):
            for sub in combinations(comps, r):
                m = base | sum(1 << i for i in sub)
                total += (-1) ** (len(comps) - r) * f[m]
        out.append(total)
    return np.array(out)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, (1 << n) - 1), st.integers(0, 2**32 - 1))))
def test_s_difference_matches_inclusion_exclusion(args):
    n, s, seed = args
    f = np.random.default_rng(seed).integers(-5, 6, size=1 << n).astype(float)
    np.testing.assert_array_equal(s_difference(f, s), _naive_difference(f, n, s))


def test_s_difference_of_parallel_over_all_components():
    # differencing os_{k:n} over everything gives its Mobius coefficient at the full set
    n = 3
    f = OrderStatisticFunction(n, n).table().astype(float)  # parallel = 1 - prod(1 - x)
    assert s_difference(f, 7)[0] == 1.0


def test_expand_submasks_preserves_order():
    support = 0b10110
    compressed = np.arange(8, dtype=np.int64)
    got = expand_submasks(compressed, support).tolist()
    assert got == [0, 2, 4, 6, 16, 18, 20, 22]


def test_level_masks_partition():
    n = 5
    levels = level_masks(n)
    assert sum(lv.size for lv in levels) == 32
    for k, lv in enumerate(levels):
        assert all(int(m).bit_count() == k for m in lv)
        assert list(lv) == sorted(lv)
