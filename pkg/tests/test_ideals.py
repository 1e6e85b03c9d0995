import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from idealcluster.ideals import (DEFAULT_CONFIG, ConfigError, DensityAlpha, ErdosUlam, Fin,
                                 IdealWarning, MembershipConfig, Summable, Verdict,
                                 alpha_equivalence_probe, alpha_weight_ratio, erdos_ulam_phi,
                                 exh_tail_value, family_statistic, gdi_block_value,
                                 ideal_from_config, lambda_representation, limsup_estimate,
                                 membership, membership_mask, natural_density_gdi, parse_ideal)
from idealcluster.indexset import (DomainError, IndexSet, density_corpus, evens, named_set, odds,
                                   squares)
from idealcluster.submeasures import (ConstantWeight, ErdosUlamSubmeasure, InvariantViolation,
                                      PowerWeight, TabulatedWeight, inverse_weight)

ALL_IDEALS = [Fin(), DensityAlpha(0.0), DensityAlpha(1.0), DensityAlpha(-1.0),
              ErdosUlam(inverse_weight()), Summable(inverse_weight()), natural_density_gdi()]


# -- alpha_weight_ratio ------------------------------------------------------------

def test_ratio_empty_and_full():
    assert alpha_weight_ratio(IndexSet.empty(), 0, 100) == 0
    assert alpha_weight_ratio(IndexSet.explicit(range(1, 101)), 0, 100) == 1


def test_ratio_evens_and_squares():
    assert alpha_weight_ratio(evens(), 0, 1000) == 0.5
    assert alpha_weight_ratio(evens(), 0, 1000, exact=True) == Fraction(1, 2)
    assert alpha_weight_ratio(squares(), 0, 10000, exact=True) == Fraction(1, 100)
    assert abs(alpha_weight_ratio(squares(), 0, 10000) - 0.01) < 1e-15


def test_ratio_exact_alpha_two():
    n = 50
    els = [i for i in range(1, n + 1) if i % 3 == 0]
    oracle = Fraction(sum(i * i for i in els), sum(i * i for i in range(1, n + 1)))
    A = IndexSet.explicit(els, n_max=n, finite=False)
    assert alpha_weight_ratio(A, 2, n, exact=True) == oracle
    assert abs(alpha_weight_ratio(A, 2, n) - float(oracle)) <= 1e-15


def test_ratio_domain_errors():
    with pytest.raises(DomainError):
        alpha_weight_ratio(evens(), 0, 0)
    with pytest.raises(DomainError):
        alpha_weight_ratio(evens(), -1.5, 10)
    with pytest.raises(DomainError):
        alpha_weight_ratio(evens(), 0.5, 10, exact=True)
    with pytest.raises(DomainError):
        DensityAlpha(-2.0)


# -- limsup_estimate ---------------------------------------------------------------------

def test_limsup_examples():
    assert limsup_estimate(np.full(100, 0.3)) == 0.3
    assert limsup_estimate(np.array([1.0 / n for n in range(1, 101)]), 0.5) == 1 / 50
    assert limsup_estimate(np.array([k % 2 for k in range(1, 101)], dtype=float)) == 1.0
    assert limsup_estimate([(n, 1.0 / n) for n in range(1, 101)]) == 1 / 50


def test_limsup_errors():
    with pytest.raises(DomainError):
        limsup_estimate(np.array([]))
    with pytest.raises(DomainError):
        limsup_estimate([])
    with pytest.raises(DomainError):
        limsup_estimate(np.ones(3), 1.0)


# -- Erdős–Ulam and tails -----------------------------------------------------------------

def test_phi_examples():
    assert erdos_ulam_phi(ConstantWeight(1.0), odds(), 100) == 1.0
    assert erdos_ulam_phi(ConstantWeight(1.0), IndexSet.empty(), 100) == 0.0
    assert erdos_ulam_phi(inverse_weight(), IndexSet.explicit([1]), 10) == 1.0


@given(st.sets(st.integers(1, 300), max_size=50), st.integers(1, 299))
def test_phi_non_decreasing_in_n(els, n):
    A = IndexSet.explicit(els)
    f = inverse_weight()
    assert erdos_ulam_phi(f, A, n) <= erdos_ulam_phi(f, A, n + 1)


def test_phi_rejects_non_positive_weight(tmp_path):
    p = tmp_path / "w.txt"
    p.write_text("1\n-1\n1\n")
    with pytest.raises(InvariantViolation):
        erdos_ulam_phi(TabulatedWeight.from_file(p), IndexSet.explicit([1, 2]), 3)


def test_exh_tail_examples():
    phi = ErdosUlamSubmeasure(ConstantWeight(1.0))
    assert exh_tail_value(phi, IndexSet.empty(), 10, 1000) == 0.0
    brute = max(sum(1 for i in range(11, m + 1) if i % 2 == 0) / m for m in range(1, 1001))
    got = exh_tail_value(phi, evens(), 10, 1000)
    assert abs(got - 0.5) < 0.01 and abs(got - brute) < 1e-12
    assert exh_tail_value(phi, IndexSet.explicit([3, 7, 10]), 10, 1000) == 0.0
    with pytest.raises(DomainError):
        exh_tail_value(phi, evens(), 11, 10)


# -- generalized density ---------------------------------------------------------------------

def test_gdi_block_examples():
    gdi = natural_density_gdi()
    assert gdi_block_value(gdi, evens(), 5) == 0.5
    assert gdi_block_value(gdi, IndexSet.empty(), 7) == 0.0
    assert gdi_block_value(gdi, IndexSet.explicit(range(17, 33)), 5) == 1.0
    with pytest.raises(DomainError):
        gdi_block_value(gdi, IndexSet.from_mask(np.ones(20, dtype=bool)), 5)


def test_lambda_representations():
    assert lambda_representation(Fin(), 1000) is None
    assert lambda_representation(Summable(inverse_weight()), 1000) is None
    g = lambda_representation(DensityAlpha(0.0), 1000)
    assert g.partition.ends_upto(64).tolist() == [1, 2, 4, 8, 16, 32, 64]
    eu = lambda_representation(ErdosUlam(inverse_weight()), 10**5)
    assert eu.window == "after-cut" and eu.cut > 1


# -- membership ------------------------------------------------------------------------------

def test_membership_squares_i0():
    N = 10**5
    v = membership(DensityAlpha(0.0), squares(), N)
    assert v.verdict is Verdict.IN_IDEAL
    window = range(math.ceil(N / 2), N + 1)
    oracle = max(math.isqrt(n) / n for n in window)
    assert abs(v.statistic - oracle) <= 1e-12 * oracle
    assert v.statistic < DEFAULT_CONFIG.in_threshold


def test_membership_evens_i0():
    v = membership(DensityAlpha(0.0), evens(), 10**5)
    assert v.verdict is Verdict.NOT_IN_IDEAL
    assert abs(v.statistic - 0.5) < 1e-4


def test_membership_fin_finite_set():
    v = membership(Fin(), IndexSet.explicit(range(1, 11)), 10**5)
    assert v.verdict is Verdict.IN_IDEAL


def test_membership_fin_infinite_sets():
    assert membership(Fin(), squares(), 10**5).verdict is Verdict.NOT_IN_IDEAL
    # a sparse set with few tail hits is not decided either way
    sparse = named_set("powers-of-two")
    assert membership(Fin(), sparse, 10**5).verdict is Verdict.UNDECIDED


def test_fin_gate_overrides_density():
    # 2^k have zero density already; the tail holds a single element
    sparse = named_set("powers-of-two")
    v = membership(DensityAlpha(0.0), sparse, 10**5)
    assert v.verdict is Verdict.IN_IDEAL


def test_thresholds_inverted_is_config_error():
    with pytest.raises(ConfigError):
        membership(DensityAlpha(0.0), evens(), 1000, MembershipConfig(in_threshold=0.1, not_in_threshold=0.05))
    with pytest.raises(ConfigError):
        MembershipConfig(window_fraction=1.0).validate()


def test_summable_convergent_weight_warns():
    with pytest.warns(IdealWarning):
        membership(Summable(PowerWeight(-2.0)), evens(), 1000)


def test_erdos_ulam_growth_warning():
    with pytest.warns(IdealWarning):
        membership(ErdosUlam(PowerWeight(-2.0)), evens(), 1000)


def test_cross_representation_agreement():
    N = 10**5
    gdi = natural_density_gdi()
    for A in density_corpus():
        a = membership(DensityAlpha(0.0), A, N).verdict
        b = membership(gdi, A, N).verdict
        assert a == b, A.name


# -- probe -----------------------------------------------------------------------------------

def test_probe_examples():
    N = 10**5
    rows = alpha_equivalence_probe(squares(), [0, 1, 2], N)
    assert all(r["verdict"] is Verdict.IN_IDEAL for r in rows)
    rows = alpha_equivalence_probe(evens(), [0, 1], N)
    assert all(r["verdict"] is Verdict.NOT_IN_IDEAL and abs(r["statistic"] - 0.5) < 1e-3 for r in rows)
    rows = alpha_equivalence_probe(IndexSet.empty(), [0, 0.5, 1, 2], N)
    assert all(r["statistic"] == 0 for r in rows)
    with pytest.raises(DomainError):
        alpha_equivalence_probe(evens(), [0, -1], 100)


# -- properties ----------------------------------------------------------------------------------

N_PROP = 2048


def _random_mask(args):
    seed, density = args
    return np.random.default_rng(seed).random(N_PROP) < density


masks = st.tuples(st.integers(0, 2**32 - 1), st.sampled_from([0.0, 0.001, 0.01, 0.05, 0.3, 0.9])).map(_random_mask)


@pytest.mark.parametrize("ideal", ALL_IDEALS, ids=lambda i: i.label)
@given(a=masks, b=masks)
def test_statistic_monotone(ideal, a, b):
    small, big = a & b, a | b
    s1 = family_statistic(ideal, small)[0]
    s2 = family_statistic(ideal, big)[0]
    assert s1 <= s2 + 1e-12


@pytest.mark.parametrize("ideal", ALL_IDEALS, ids=lambda i: i.label)
@given(a=masks)
def test_verdict_consistent_with_statistic(ideal, a):
    v = membership_mask(ideal, a)
    if v.verdict is Verdict.IN_IDEAL:
        assert v.statistic < v.threshold
    elif v.verdict is Verdict.NOT_IN_IDEAL:
        assert v.statistic >= v.promotion
    elif not math.isnan(v.statistic):
        assert v.threshold <= v.statistic < v.promotion or v.gate == "fin"


@pytest.mark.parametrize("ideal", ALL_IDEALS, ids=lambda i: i.label)
@given(els=st.sets(st.integers(1, 10**4), max_size=40))
def test_finite_sets_in_every_ideal(ideal, els):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IdealWarning)
        v = membership(ideal, IndexSet.explicit(els), 10**4)
    assert v.verdict is Verdict.IN_IDEAL


# -- config ---------------------------------------------------------------------------------

def test_parse_ideal_forms():
    assert isinstance(parse_ideal("fin"), Fin)
    assert parse_ideal("density:0.5").alpha == 0.5
    assert parse_ideal("erdos-ulam:inverse").label == "erdos-ulam(inverse)"
    assert parse_ideal("summable:power=-0.5").weight.s == -0.5
    assert parse_ideal("gdi:natural-density").label == "gdi(natural-density)"
    with pytest.raises(ConfigError):
        parse_ideal("banach")


def test_ideal_from_config(tmp_path):
    p = tmp_path / "f.txt"
    p.write_text("\n".join(str(1.0 / k) for k in range(1, 101)))
    eu = ideal_from_config({"family": "erdos-ulam", "weight_file": str(p)})
    assert eu.weight.values(3).tolist() == [1.0, 0.5, 1.0 / 3]
    assert ideal_from_config({"family": "gdi", "representation": "weight-blocks",
                              "weight": "constant", "ratio": 2}).partition.ends_upto(8).tolist() == [1, 2, 4, 8]
    with pytest.raises(ConfigError):
        ideal_from_config({"family": "gdi", "representation": "other"})


@pytest.mark.parametrize("ideal", ALL_IDEALS, ids=lambda i: i.label)
@given(els=st.sets(st.integers(1, 1000), max_size=40))
def test_bounded_sets_in_every_ideal_from_data(ideal, els):
    # no finiteness declaration: the verdict comes from the prefix alone
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IdealWarning)
        v = membership(ideal, IndexSet.explicit(els, n_max=10**4, finite=False), 10**4)
    assert v.verdict is Verdict.IN_IDEAL
