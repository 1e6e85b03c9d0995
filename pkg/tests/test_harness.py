import numpy as np
import pytest

from idealcluster import harness
from idealcluster.harness import (ExperimentConfig, run_corollary_fin, run_dichotomy, run_montecarlo,
                                  run_oracle_suite)
from idealcluster.ideals import ConfigError, MembershipConfig
from idealcluster.omega import OmegaPrefix


def test_config_from_toml(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text('sequence = "evens-indicator"\nideal = "density:1"\nN = 5000\ntrials = 3\n'
                 'qgrid = [0.5, 0.25]\nlambda = false\n'
                 '[schedule]\neps0 = 0.25\nM = 5\n[thresholds]\nmin_hits = 10\n')
    cfg = ExperimentConfig.from_toml(p).validate()
    assert cfg.N == 5000 and cfg.trials == 3 and cfg.qgrid == (0.5, 0.25)
    assert not cfg.lambda_enabled and cfg.thresholds.min_hits == 10
    s = cfg.schedule()
    assert (s.eps0, s.M) == (0.25, 5)
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


def test_config_defaults_from_zoo():
    cfg = ExperimentConfig(sequence="rational-enumeration-[0,1]")
    from idealcluster.zoo import zoo
    e = zoo("rational-enumeration-[0,1]")
    assert (cfg.schedule().eps0, cfg.schedule().M) == (e.eps0, e.M)
    assert cfg.resolved_N() == 10**5
    assert ExperimentConfig(ideal="density:-1").resolved_N() == 10**6


@pytest.mark.parametrize("d", [{"bogus": 1}, {"thresholds": {"nope": 2}}])
def test_config_unknown_keys(d):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(d)


@pytest.mark.parametrize("over", [
    {"trials": 0},
    {"N": 100},
    {"format": "xml"},
    {"qgrid": ()},
    {"thresholds": MembershipConfig(in_threshold=0.1, not_in_threshold=0.05)},
    {"ideal": "density:nonsense"},
])
def test_config_validate_rejects(over):
    with pytest.raises((ConfigError, ValueError)):
        ExperimentConfig(**over).validate()


def test_montecarlo_constant_zero():
    cfg = ExperimentConfig(sequence="constant-zero", N=5000, trials=4, seed=1)
    s = run_montecarlo(cfg)
    assert s.fraction_gamma_preserved == 1.0 and s.fraction_lambda_preserved == 1.0
    assert s.voided == 0 and [r["trial"] for r in s.records] == [0, 1, 2, 3]
    assert s.base["Gamma"]["accepted"] == [[0.0]]


def test_montecarlo_workers_match_serial():
    cfg = ExperimentConfig(sequence="evens-indicator", N=5000, trials=4, seed=3)
    assert run_montecarlo(cfg).records == run_montecarlo(cfg, workers=2).records


def test_montecarlo_voided_trials(monkeypatch):
    monkeypatch.setattr(harness, "sample_uniform",
                        lambda seed, N, stream=0: OmegaPrefix(np.zeros(N, dtype=np.uint8)))
    s = run_montecarlo(ExperimentConfig(sequence="constant-zero", N=1000, trials=3))
    assert s.voided == 3 and all(r["voided"] for r in s.records)
    assert np.isnan(s.fraction_gamma_preserved)


def test_montecarlo_without_lambda():
    s = run_montecarlo(ExperimentConfig(sequence="constant-zero", N=2000, trials=2, lambda_enabled=False))
    assert s.fraction_lambda_preserved is None and "Lambda" not in s.base


@pytest.mark.parametrize("name", ["evens-indicator", "constant-zero"])
def test_dichotomy_preserving_cases(name):
    r = run_dichotomy(ExperimentConfig(sequence=name, N=10**4, trials=3))
    assert r["case"] == "preserving" and r["coherent"]
    assert not r["measure_category_divergence"]
    assert r["witness"]["gamma_equals_L"]


def test_dichotomy_squares_small():
    r = run_dichotomy(ExperimentConfig(sequence="squares-indicator", N=10**4, trials=3))
    assert r["case"] == "dichotomy" and r["coherent"]
    assert r["witness"]["gamma_equals_L"]
    rows = harness.dichotomy_rows(r)
    assert {"set": "L", "point": [1.0], "status": "accepted"} in rows


def test_dichotomy_greedy_targets():
    seq = {"kind": "indicator", "set": "evens"}
    r = run_dichotomy(ExperimentConfig(sequence=seq, N=10**4, trials=2))
    assert r["case"] == "preserving" and r["witness"]["gamma_equals_L"]


def test_corollary_fin_inverse_n():
    r = run_corollary_fin(ExperimentConfig(sequence="inverse-n", N=10**4, trials=3))
    assert r["witness"]["preserves_L"]
    assert r["random"]["fraction_L_preserved"] == 1.0


def test_oracle_suite_small():
    res = run_oracle_suite("small", seed=11)
    assert res.passed, [c for c in res.checks if not c.passed]
    assert len(res.rows()) == len(res.checks)


def test_oracle_suite_rejects_bad_input():
    with pytest.raises(ConfigError):
        run_oracle_suite("small", config=MembershipConfig(in_threshold=0.2, not_in_threshold=0.1))
    with pytest.raises(ConfigError):
        run_oracle_suite("huge")
