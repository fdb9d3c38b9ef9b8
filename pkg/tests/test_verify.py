import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from modineq import builders as B
from modineq.errors import DimensionError, ParameterError, UnknownIdError
from modineq.tensor import HermitianMatrix, SpaceDims, marginal
from modineq.verify import (
    TrialConfig,
    TrialRecord,
    VerificationReport,
    block_layouts,
    builder_spec,
    convexity_trials,
    counterexample_search,
    equality_state,
    h_nonconvexity_probe,
    matched_gamma,
    monotonicity_trials,
    random_state,
    thread_count,
    verify_equality_gamma,
    verify_psd,
)

from oracles import seeds


def test_random_state_basics():
    assert np.array_equal(random_state(1, 0), np.ones((1, 1)))
    assert np.array_equal(random_state(4, 9), random_state(4, 9))
    assert not np.array_equal(random_state(4, 9), random_state(4, 10))
    with pytest.raises(DimensionError):
        random_state(0, 1)


@given(st.integers(1, 6), seeds)
def test_random_state_is_full_rank_state(d, seed):
    rho = random_state(d, seed)
    assert HermitianMatrix(rho).is_state(1e-12)
    assert np.linalg.eigvalsh(rho)[0] >= 1e-9 / d * (1 - 1e-6)


def test_random_state_mean_eigenvalue():
    rng = np.random.default_rng(3)
    w = np.array([np.linalg.eigvalsh(random_state(4, rng)) for _ in range(1000)])
    assert abs(w.mean() - 0.25) <= 0.02 * 0.25


# -- equality states --------------------------------------------------------------


def test_single_trivial_block_is_product():
    st_ = equality_state([(2, 1, 1, 3)], 5)
    dims = st_.dims
    assert dims == SpaceDims(2, 1, 3)
    rho = st_.matrix
    expected = np.kron(marginal(rho, dims, "A"), marginal(rho, dims, "C"))
    assert np.allclose(rho, expected, atol=1e-14)


def test_single_block_split_of_db4():
    st_ = equality_state([(2, 2, 2, 2)], 1, dB=4)
    assert st_.dims == SpaceDims(2, 4, 2)
    expected = np.kron(st_.ab_blocks[0], st_.bc_blocks[0])
    assert np.allclose(st_.matrix, expected, atol=1e-14)
    assert B.ssa_operator(st_.matrix, st_.dims).norm <= 1e-8


def test_two_blocks_give_ssa_equality():
    st_ = equality_state([(2, 1, 1, 2), (2, 1, 2, 2)], 11)
    assert st_.dims == SpaceDims(2, 3, 2)
    assert HermitianMatrix(st_.matrix).is_state(1e-12)
    assert st_.weights.sum() == pytest.approx(1.0)
    assert B.ssa_operator(st_.matrix, st_.dims).norm <= 1e-8


def test_equality_state_errors():
    with pytest.raises(DimensionError):
        equality_state([(2, 2, 2, 2)], 0, dB=3)
    with pytest.raises(DimensionError):
        equality_state([(2, 1, 1, 2), (3, 1, 1, 2)], 0)
    with pytest.raises(DimensionError):
        equality_state([], 0)


def test_matched_and_mismatched_gamma():
    st_ = equality_state([(2, 1, 1, 2), (2, 1, 1, 2)], 4)
    good = matched_gamma(st_, 8)
    bad = matched_gamma(st_, 8, match=False)
    assert B.mpt_operator(st_.matrix, good, st_.dims).norm <= 1e-8
    assert B.mpt_operator(st_.matrix, bad, st_.dims).norm > 1e-4


def test_block_layouts():
    assert block_layouts(SpaceDims(2, 2, 2)) == [((2, 1, 2, 2),), ((2, 2, 1, 2),), ((2, 1, 1, 2), (2, 1, 1, 2))]


# -- configuration and reports ------------------------------------------------------


def test_trial_config_invariants():
    with pytest.raises(ParameterError):
        TrialConfig(trials=0)
    with pytest.raises(ParameterError):
        TrialConfig(tol_psd=0.0)
    assert "threads" not in TrialConfig(threads=3).to_dict()


def test_verdict_rules():
    recs = [TrialRecord("x", 1, -1.0, 0.0, verdict=False), TrialRecord("x", 2, 0.1, 0.0, verdict=True)]
    assert not VerificationReport("a", "psd", 1e-9, recs).passed
    search = VerificationReport("s", "search", 1e-8, recs)
    assert search.passed and search.witness_seed == 2
    assert not VerificationReport("s", "search", 1e-8, recs[:1]).passed


def test_psd_record_verdict_matches_definition():
    rep = verify_psd("ssa", TrialConfig(trials=10, seed=3))
    for r in rep.records:
        assert r.verdict == (r.min_eig >= -1e-9 and r.herm_defect <= 1e-9)
    assert rep.passed and rep.pass_count == 10


def test_report_roundtrip_and_determinism():
    cfg = TrialConfig(trials=8, seed=5)
    a, b = verify_psd("mpt", cfg), verify_psd("mpt", cfg)
    ja = json.dumps(a.to_dict(), sort_keys=True)
    assert ja == json.dumps(b.to_dict(), sort_keys=True)
    back = VerificationReport.from_dict(json.loads(ja))
    assert json.dumps(back.to_dict(), sort_keys=True) == ja


def test_thread_count_and_order_independence(monkeypatch):
    monkeypatch.setenv("MODINEQ_THREADS", "1")
    assert thread_count(8) == 1
    one = verify_psd("cs", TrialConfig(trials=12, seed=1)).to_dict()
    monkeypatch.setenv("MODINEQ_THREADS", "4")
    assert thread_count(8) == 4
    four = verify_psd("cs", TrialConfig(trials=12, seed=1)).to_dict()
    assert one == four


def test_builder_spec_ids():
    assert builder_spec("wyd:0.5").id == "wyd:0.5"
    assert builder_spec("general:bures").id == "general:bures"
    with pytest.raises(UnknownIdError, match="ssa"):
        builder_spec("nope")
    with pytest.raises(ParameterError, match=r"\{0,1\}"):
        builder_spec("wyd:0")
    with pytest.raises(ParameterError):
        builder_spec("wyd:3")


def test_replay_single_trial():
    rep = verify_psd("xhalf", TrialConfig(trials=5, seed=20))
    again = verify_psd("xhalf", TrialConfig(trials=1, seed=23))
    assert rep.to_dict()["records"][3] == again.to_dict()["records"][0]


# -- suites -------------------------------------------------------------------------


def test_equality_suite_small():
    eq, mismatch, perturbed = verify_equality_gamma(TrialConfig(trials=6, seed=2))
    assert eq.passed and eq.kind == "equality"
    assert max(r.norm for r in eq.records) <= 1e-8
    assert mismatch.passed
    assert all(r.min_eig >= -1e-9 for r in perturbed.records)


def test_counterexample_searches():
    for name in ("nonherm_probe", "xpq_probe", "h_probe"):
        rep = counterexample_search(name)
        assert rep.passed, name
        assert rep.witness_seed is not None
    with pytest.raises(UnknownIdError):
        counterexample_search("ssa")


def test_h_probe_budget_exhausted_is_failure():
    rep = h_nonconvexity_probe(seed=42, budget=3)
    assert not rep.passed and rep.witness_seed is None
    assert all(r.identities["trace_slack"] >= -1e-9 for r in rep.records)


def test_convexity_and_monotonicity_wyd_endpoint():
    cfg = TrialConfig(trials=10, seed=4)
    assert convexity_trials("wyd:2", cfg).passed
    assert monotonicity_trials("wyd:2", cfg).passed
    assert convexity_trials("neg_log", cfg).worst_min_eig >= -1e-9
