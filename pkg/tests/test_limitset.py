import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from idealcluster.harness import (TINY_CONFIG, estimator_decision, oracle_decision,
                                  tiny_lambda_instances)
from idealcluster.ideals import (ConfigError, DensityAlpha, ErdosUlam, Fin, GeneralizedDensity,
                                 Summable, lambda_representation, natural_density_gdi)
from idealcluster.indexset import squares
from idealcluster.limitset import (LambdaWitnessError, NeighborhoodSchedule,
                                   brute_force_lambda_oracle, candidate_grid, compare_sets,
                                   estimate_Gamma, estimate_L, estimate_Lambda, estimate_Lambda_gdi,
                                   extract_lambda_witness, grid_spacing, inclusion_violations,
                                   make_qgrid, v_ell_statistic)
from idealcluster.omega import ALL_ONES, encode
from idealcluster.sequences import MetricSpace, SequencePrefix, generate
from idealcluster.submeasures import BlockNormalizedCount, ExplicitPartition, inverse_weight
from idealcluster.zoo import ZOO_NAMES, zoo

SCH = NeighborhoodSchedule(0.5, 8)
N = 10**5


def _x(name, n=N):
    return generate(zoo(name).spec, n)


def test_schedule():
    s = NeighborhoodSchedule(0.5, 4)
    assert s.radii.tolist() == [0.5, 0.25, 0.125, 0.0625, 0.03125]
    assert np.all(np.diff(s.radii) < 0) and s.eps_M > 0
    with pytest.raises(ConfigError):
        NeighborhoodSchedule(0.0, 3)
    with pytest.raises(ConfigError):
        NeighborhoodSchedule(0.5, -1)


@pytest.mark.parametrize("d,metric", [(1, "euclidean"), (2, "euclidean"), (2, "max"), (3, "euclidean")])
@given(seed=st.integers(0, 2**31))
def test_candidate_grid_covers_values(d, metric, seed):
    rng = np.random.default_rng(seed)
    x = SequencePrefix(rng.normal(size=(200, d)), MetricSpace(d, metric))
    sch = NeighborhoodSchedule(0.5, 4)
    grid = candidate_grid(x, sch, 20)
    for v in x.values:
        assert x.space.distance(grid, v).min() <= sch.eps_M * (1 + 1e-12)


def test_degenerate_schedule_is_config_error():
    with pytest.raises(ConfigError):
        estimate_L(SequencePrefix(np.full(100, 1e6)), NeighborhoodSchedule(1e-12, 2))


# -- L -----------------------------------------------------------------------------------

def test_L_examples():
    assert estimate_L(_x("constant-zero", 1000), SCH).accepted.tolist() == [[0.0]]
    assert estimate_L(_x("squares-indicator", 10**4), SCH, min_hits=20).accepted.tolist() == [[0.0], [1.0]]
    # the tail of 1/n sits inside the eps_M ball of the first positive grid node too
    L = estimate_L(_x("inverse-n"), SCH)
    assert compare_sets(L.accepted, [[0.0]], 2 * SCH.eps_M).equal


def test_L_requires_min_hits():
    with pytest.raises(ConfigError):
        estimate_L(_x("constant-zero", 10), SCH, min_hits=20)


# -- Gamma -------------------------------------------------------------------------------

def test_gamma_examples():
    x = _x("squares-indicator")
    G = estimate_Gamma(x, DensityAlpha(0.0), SCH)
    assert G.accepted.tolist() == [[0.0]]
    one = [r for r in G.records if r.point.tolist() == [1.0]][0]
    assert one.status == "rejected"
    assert max(one.statistics) < 0.01
    assert estimate_Gamma(_x("constant-zero", 1000), ErdosUlam(inverse_weight()), SCH).accepted.tolist() == [[0.0]]
    assert estimate_Gamma(_x("evens-indicator"), DensityAlpha(0.0), SCH).accepted.tolist() == [[0.0], [1.0]]


@pytest.mark.parametrize("name", ZOO_NAMES)
def test_gamma_fin_equals_L(name):
    e = zoo(name)
    x = _x(name)
    sch = NeighborhoodSchedule(e.eps0, e.M)
    L = estimate_L(x, sch)
    G = estimate_Gamma(x, Fin(), sch)
    assert np.array_equal(L.accepted, G.accepted)


@pytest.mark.parametrize("name", ZOO_NAMES)
def test_declared_gamma_and_lambda(name):
    e = zoo(name)
    x = _x(name)
    sch = NeighborhoodSchedule(e.eps0, e.M)
    h = grid_spacing(sch, x.space.dimension)
    tol = 2 * sch.eps_M
    G = estimate_Gamma(x, DensityAlpha(0.0), sch)
    Lam = estimate_Lambda(x, DensityAlpha(0.0), sch)
    assert compare_sets(G.accepted, e.Gamma.net(h), tol, x.space).equal
    assert compare_sets(Lam.accepted, e.Lambda.net(h), tol, x.space).equal
    for rec in G.records:
        if rec.status == "accepted":
            assert all(v == "NotInIdeal" for v in rec.verdicts)


@pytest.mark.parametrize("name", ["squares-indicator", "evens-indicator", "doubling-blocks-01"])
def test_summable_lambda_routes_through_gamma(name):
    x = _x(name)
    ideal = Summable(inverse_weight())
    G = estimate_Gamma(x, ideal, SCH)
    Lam = estimate_Lambda(x, ideal, SCH)
    assert np.array_equal(G.accepted, Lam.accepted)
    assert Lam.params["route"].startswith("gamma")


@pytest.mark.parametrize("name", ZOO_NAMES)
def test_gdi_lambda_agrees_with_gamma(name):
    e = zoo(name)
    x = _x(name)
    sch = NeighborhoodSchedule(e.eps0, e.M)
    gdi = natural_density_gdi()
    G = estimate_Gamma(x, gdi, sch)
    Lam = estimate_Lambda(x, gdi, sch)
    assert compare_sets(G.accepted, Lam.accepted, 2 * sch.eps_M, x.space).equal
    assert inclusion_violations(Lam, G).size == 0


# -- Lambda machinery -----------------------------------------------------------------------

def test_v_ell_examples():
    gdi = natural_density_gdi()
    x0 = _x("constant-zero", 4096)
    assert np.all(v_ell_statistic(x0, ALL_ONES, [0.0], gdi, SCH) == 1.0)
    xs = _x("squares-indicator", 10**4)
    v = v_ell_statistic(xs, encode(squares(), 10**4), [1.0], gdi, SCH)
    assert np.all(v == 1.0)
    rep = estimate_Lambda_gdi(xs, gdi, SCH, candidates=[[0.0]])
    assert np.allclose(v_ell_statistic(xs, ALL_ONES, [0.0], gdi, SCH), rep.records[0].statistics)


def test_v_ell_empty_subsequence():
    from idealcluster.omega import EmptySubsequenceWarning, OmegaPrefix
    with pytest.raises(ValueError), pytest.warns(EmptySubsequenceWarning):
        v_ell_statistic(_x("constant-zero", 8), OmegaPrefix(np.zeros(8)), [0.0], natural_density_gdi(), SCH)


def test_lambda_gdi_examples():
    gdi = natural_density_gdi()
    r0 = estimate_Lambda_gdi(_x("constant-zero", 10**4), gdi, SCH)
    assert r0.accepted.tolist() == [[0.0]]
    zero = [r for r in r0.records if r.point.tolist() == [0.0]][0]
    assert zero.passing_q == r0.params["qgrid"][0]
    rs = estimate_Lambda_gdi(_x("squares-indicator"), gdi, SCH)
    assert rs.accepted.tolist() == [[0.0]]
    assert [r.status for r in rs.records if r.point.tolist() == [1.0]] == ["rejected"]
    re_ = estimate_Lambda_gdi(_x("evens-indicator"), gdi, SCH)
    assert re_.accepted.tolist() == [[0.0], [1.0]]
    assert all(r.passing_q == 0.5 for r in re_.records if r.status == "accepted")


def test_qgrid():
    gdi = natural_density_gdi()
    assert make_qgrid(gdi, N) == [0.5, 0.25, 0.1, 0.05, 0.01]
    assert make_qgrid(gdi, N, qgrid=[0.1, 0.3, 0.001]) == [0.3, 0.1]
    with pytest.raises(ConfigError):
        make_qgrid(gdi, N, qgrid=[])
    with pytest.raises(ConfigError):
        estimate_Lambda_gdi(_x("constant-zero", 1000), gdi, SCH, qgrid=[])
    with pytest.raises(ConfigError):
        make_qgrid(gdi, N, qgrid=[0.001])


@given(seed=st.integers(0, 2**31))
def test_q_monotonicity(seed):
    inst = tiny_lambda_instances(seed, count=4)
    for it in inst:
        qs = sorted({0.05, 0.2, 0.4, 0.6, 0.9, 1.0})
        acc = []
        for q in qs:
            rep = estimate_Lambda_gdi(it.x, it.gdi, NeighborhoodSchedule(it.eps, 0), [q], TINY_CONFIG,
                                      candidates=[it.ell])
            acc.append(rep.records[0].status == "accepted")
        # accepted at a larger q implies accepted at every smaller q
        for a, b in zip(acc, acc[1:]):
            assert a or not b


@given(seed=st.integers(0, 2**31))
def test_refinement_only_shrinks(seed):
    rng = np.random.default_rng(seed)
    x = SequencePrefix(rng.choice([0.0, 0.3, 1.0], size=4000, p=[0.5, 0.49, 0.01]) + rng.normal(0, 1e-3, 4000))
    cand = candidate_grid(x, NeighborhoodSchedule(0.5, 6), 20)
    coarse = estimate_Gamma(x, DensityAlpha(0.0), NeighborhoodSchedule(0.5, 4), candidates=cand)
    fine = estimate_Gamma(x, DensityAlpha(0.0), NeighborhoodSchedule(0.5, 6), candidates=cand)
    assert inclusion_violations(fine, coarse).size == 0


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_oracle_agreement(seed):
    for inst in tiny_lambda_instances(seed, 50):
        assert estimator_decision(inst) == oracle_decision(inst)


def test_witness_examples():
    gdi = natural_density_gdi()
    x0 = _x("constant-zero", 4096)
    w = extract_lambda_witness(x0, [0.0], gdi, 1.0, SCH)
    assert all(v == 1.0 for _, _, v, _ in w.blocks)
    xe = _x("evens-indicator")
    w = extract_lambda_witness(xe, [1.0], gdi, 0.4, SCH)
    assert np.all(w.indices % 2 == 0)
    assert all(v >= 0.4 * (1 - 2.0 ** -(m + 1)) for m, _, v, _ in w.blocks)
    assert w.best >= 0.4 * (1 - 2.0 ** -(SCH.M + 1))
    # later blocks come from smaller balls
    js = [j for _, j, _, _ in w.blocks]
    assert js == sorted(js)
    with pytest.raises(LambdaWitnessError) as info:
        extract_lambda_witness(_x("squares-indicator"), [1.0], gdi, 0.1, SCH)
    assert info.value.kind == "rejection" and info.value.best < 0.01


def test_witness_shortfall_kind():
    gdi = natural_density_gdi()
    with pytest.raises(LambdaWitnessError) as info:
        extract_lambda_witness(_x("evens-indicator"), [1.0], gdi, 0.9, SCH)
    assert info.value.kind == "shortfall"


def test_brute_force_examples():
    part = ExplicitPartition((3, 8, 12))
    gdi = GeneralizedDensity(part, BlockNormalizedCount(), window="endpoint", fraction=1e-9)
    x = SequencePrefix(np.full(12, 0.5))
    assert brute_force_lambda_oracle(x, gdi, [0.5], 1.0, 0.1)
    assert not brute_force_lambda_oracle(x, gdi, [0.0], 0.01, 0.1)
    with pytest.raises(ValueError):
        brute_force_lambda_oracle(SequencePrefix(np.zeros(25)), gdi, [0.0], 0.5, 0.1)


def test_compare_sets_examples():
    a = np.array([[0.0], [1.0]])
    assert compare_sets(a, a, 0.01).equal
    c = compare_sets([[0.0]], a, 0.1)
    assert not c.equal and c.b_minus_a.tolist() == [[1.0]] and c.a_minus_b.size == 0
    eps = 0.05
    net = np.linspace(0, 1, 21).reshape(-1, 1)
    finer = np.linspace(0, 1, 41).reshape(-1, 1)
    c = compare_sets(net, finer, eps)
    assert c.equal and c.hausdorff <= eps / 2 + 1e-12
    assert compare_sets(np.empty((0, 1)), np.empty((0, 1)), 0.1).equal
    assert math.isinf(compare_sets(a, np.empty((0, 1)), 0.1).hausdorff)


def test_report_exports():
    G = estimate_Gamma(_x("squares-indicator", 10**4), DensityAlpha(0.0), SCH)
    d = G.as_dict()
    assert d["kind"] == "Gamma" and len(d["records"]) == len(G.records)
    rows = G.rows()
    assert {"x0", "status", "stat_0", "verdict_0"} <= set(rows[0])
    pts = [r.point.tolist() for r in G.records]
    assert pts == sorted(pts)


def test_lambda_for_erdos_ulam_uses_block_representation():
    x = _x("evens-indicator")
    ideal = ErdosUlam(inverse_weight())
    rep = estimate_Lambda(x, ideal, SCH)
    assert rep.params["route"] == lambda_representation(ideal, x.N).label
    assert inclusion_violations(rep, estimate_Gamma(x, ideal, SCH)).size == 0
