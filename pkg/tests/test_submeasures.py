import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from idealcluster.harness import _SqrtCountMu
from idealcluster.indexset import DomainError
from idealcluster.submeasures import (BlockNormalizedCount, BlockNormalizedWeight, ConstantWeight,
                                      CumulativeWeightFamily, DyadicPartition, ErdosUlamSubmeasure,
                                      ExplicitPartition, FunctionSubmeasure, InvariantViolation,
                                      PowerWeight, SubmeasureFamily, SupSubmeasure, TabulatedWeight,
                                      WeightedMeasure, WeightRatioPartition, compensated_cumsum,
                                      inverse_weight, named_weight)

U = 256
subsets = st.sets(st.integers(1, U), max_size=64)


def _mask(s):
    m = np.zeros(U, dtype=bool)
    m[[i - 1 for i in s]] = True
    return m


def _instances():
    part = ExplicitPartition((3, 10, 40, 100, 256))
    out = [
        WeightedMeasure(ConstantWeight(1.0), 256.0),
        WeightedMeasure(inverse_weight()),
        ErdosUlamSubmeasure(ConstantWeight(1.0)),
        ErdosUlamSubmeasure(inverse_weight()),
        ErdosUlamSubmeasure(PowerWeight(0.5)),
        SupSubmeasure((WeightedMeasure(inverse_weight()), ErdosUlamSubmeasure(ConstantWeight(1.0)))),
        FunctionSubmeasure(lambda els: math.sqrt(len(els)), "sqrt-count"),
    ]
    for fam in (BlockNormalizedCount(), BlockNormalizedWeight(inverse_weight()),
                CumulativeWeightFamily(PowerWeight(1.0)),
                SubmeasureFamily(_SqrtCountMu(part), part)):
        out += [fam.submeasure(j, part) for j in (1, 3, 5)]
    return out


INSTANCES = _instances()


@pytest.mark.parametrize("phi", INSTANCES, ids=lambda p: p.name)
def test_empty_is_zero(phi):
    assert phi.evaluate(np.zeros(U, dtype=bool)) == 0.0


@pytest.mark.parametrize("phi", INSTANCES, ids=lambda p: p.name)
def test_singletons_finite(phi):
    for n in (1, 2, 17, 256):
        v = phi.evaluate(_mask({n}))
        assert math.isfinite(v) and v >= 0


@pytest.mark.parametrize("phi", INSTANCES, ids=lambda p: p.name)
@given(a=subsets, b=subsets)
def test_monotone_and_subadditive(phi, a, b):
    va, vb, vu = phi.evaluate(_mask(a)), phi.evaluate(_mask(b)), phi.evaluate(_mask(a | b))
    tol = 1e-12
    assert va <= vu + tol and vb <= vu + tol
    assert vu <= va + vb + tol


def test_erdos_ulam_examples():
    phi = ErdosUlamSubmeasure(ConstantWeight(1.0))
    odds = np.arange(1, 101) % 2 == 1
    assert phi.evaluate(odds) == 1.0
    assert ErdosUlamSubmeasure(inverse_weight())([1], 10) == 1.0


def test_nonpositive_weight_is_invariant_violation(tmp_path):
    p = tmp_path / "w.txt"
    p.write_text("1\n0.5\n0\n2\n")
    w = TabulatedWeight.from_file(p)
    with pytest.raises(InvariantViolation):
        ErdosUlamSubmeasure(w).evaluate(np.ones(4, dtype=bool))


def test_tabulated_weight_too_short(tmp_path):
    p = tmp_path / "w.txt"
    p.write_text("1\n2\n")
    w = TabulatedWeight.from_file(p)
    with pytest.raises(DomainError):
        w.values(3)


def test_named_weights():
    assert named_weight("constant").values(3).tolist() == [1.0, 1.0, 1.0]
    assert named_weight("inverse").values(2).tolist() == [1.0, 0.5]
    assert named_weight("power", s=2).values(3).tolist() == [1.0, 4.0, 9.0]
    with pytest.raises(KeyError):
        named_weight("nope")


def test_compensated_cumsum_matches_fsum():
    rng = np.random.default_rng(1)
    v = rng.random(5000) * 10.0 ** rng.integers(-8, 8, 5000)
    c = compensated_cumsum(v, block=64)
    for k in (1, 63, 64, 65, 4999, 5000):
        assert abs(c[k - 1] - math.fsum(v[:k])) <= 1e-14 * math.fsum(v[:k])


def test_dyadic_partition_blocks():
    P = DyadicPartition()
    assert P.block(1) == (1, 2)
    assert P.block(5) == (17, 32)
    assert P.block_of(17) == 5 and P.block_of(16) == 4 and P.block_of(1) == 1
    assert P.ends_upto(100).tolist() == [2, 4, 8, 16, 32, 64]


def test_explicit_partition_extends():
    P = ExplicitPartition((2, 6, 12))
    assert P.ends_upto(30).tolist() == [2, 6, 12, 18, 24, 30]
    with pytest.raises(DomainError):
        ExplicitPartition((3, 3))


def test_weight_ratio_partition_constant_weight_is_dyadic_ends():
    P = WeightRatioPartition(ConstantWeight(1.0), 2.0)
    assert P.ends_upto(64).tolist() == [1, 2, 4, 8, 16, 32, 64]


@pytest.mark.parametrize("P", [DyadicPartition(), ExplicitPartition((1, 5, 6, 20)),
                               WeightRatioPartition(inverse_weight(), 1.5)], ids=lambda p: p.name)
@given(i=st.integers(1, 2000))
def test_partition_invariants(P, i):
    j = P.block_of(i)
    lo, hi = P.block(j)
    assert lo <= i <= hi
    if j > 1:
        assert P.block(j - 1)[1] == lo - 1
    else:
        assert lo == 1


def test_block_values_agree_with_submeasures():
    rng = np.random.default_rng(5)
    part = ExplicitPartition((4, 9, 20, 33, 50))
    mask = rng.random(50) < 0.4
    ends = part.ends_upto(50)
    for fam in (BlockNormalizedCount(), BlockNormalizedWeight(PowerWeight(-0.5)),
                CumulativeWeightFamily(PowerWeight(2.0)), SubmeasureFamily(_SqrtCountMu(part), part)):
        vals = fam.block_values(mask, ends)
        direct = [fam.submeasure(j, part).evaluate(mask) for j in range(1, ends.size + 1)]
        assert np.allclose(vals, direct, rtol=1e-13, atol=0)


def test_block_normalized_weight_full_block_is_one():
    part = WeightRatioPartition(inverse_weight(), 2.0)
    ends = part.ends_upto(2000)
    vals = BlockNormalizedWeight(inverse_weight()).block_values(np.ones(2000, dtype=bool), ends)
    assert np.allclose(vals, 1.0, rtol=1e-13)
