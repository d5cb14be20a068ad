import json
import math

import numpy as np
import pytest

from privamp.asymptotics import chernoff_rate
from privamp.dist import JointSubDistribution
from privamp.entropy import Iprime, cond_renyi, d1prime, smoothing_distance_min
from privamp.verify import (
    VerificationCase,
    axiom_report,
    boundary_fixtures,
    builtin_corpus,
    chain_rule_gap,
    check_case,
    corpus_families,
    grid_oracle,
    random_corpus,
    run_suite,
)


def test_case_record_and_status():
    case = VerificationCase("x", "demo", {})
    assert case.record("ok", 1.0, 1.0)
    assert not case.record("bad", 2.0, 1.0)
    assert case.finish().status == "fail"
    case.record("inf", 0.0, math.inf)
    json.dumps(case.to_dict())


def test_corpus_shape():
    fams = corpus_families()
    assert len(fams) == 18
    assert all(not f.non_surjective() for f in fams)
    assert len(builtin_corpus()) == 180
    fx = boundary_fixtures(4, 2)
    assert set(fx) == {"point_mass", "ideal_product", "uniform_conditional", "A_determines_E", "sparse"}
    for mass in fx.values():
        assert mass.sum() == pytest.approx(1.0)


def test_random_corpus_is_reproducible():
    a = random_corpus(42, 5)
    b = random_corpus(42, 5)
    for (ia, fa, ma, sa), (ib, fb, mb, sb) in zip(a, b):
        assert ia == ib and sa == sb and np.array_equal(ma, mb)
        assert fa.kind == fb.kind and fa.n == fb.n and fa.m == fb.m


def test_check_case_passes_on_random_inputs():
    for cid, fam, mass, seed in random_corpus(7, 6):
        case = check_case(cid, fam, mass, seed)
        assert case.status == "pass", [c for c in case.checks if not c["ok"]]


def test_harness_detects_corrupted_bounds():
    """Scaling every bound by 0.5 must make some comparisons fail."""
    report = run_suite("random", seed=3, count=20, corrupt=0.5)
    assert not report["passed"]
    assert report["failed"] > 0
    assert len(report["failed_ids"]) == report["failed"]


def test_run_suite_rejects_bad_arguments():
    with pytest.raises(ValueError):
        run_suite("random", seed=None)
    with pytest.raises(ValueError):
        run_suite("nope")


# ---------------------------------------------------------------- oracles


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_max_over_Q_grid_matches_up_variant(seed):
    rng = np.random.default_rng(seed)
    P = JointSubDistribution(rng.dirichlet(np.ones(6)).reshape(3, 2))
    for s in (0.5, 1.0, 2.0):
        value, _ = grid_oracle("maxQ_H2", {"P": P.mass, "s": s}, resolution=20000)
        closed = cond_renyi(P, s, variant="up")
        assert value <= closed + 1e-12
        assert value == pytest.approx(closed, abs=1e-6)
    P3 = JointSubDistribution(rng.dirichlet(np.ones(6)).reshape(2, 3))
    value, _ = grid_oracle("maxQ_H2", {"P": P3.mass}, resolution=1500)
    assert value == pytest.approx(cond_renyi(P3, 1.0, variant="up"), abs=1e-5)


def test_smooth_min_grid_matches_closed_form(std):
    for R in (0.0, 0.5, math.log(2), 1.5):
        value, _ = grid_oracle("smooth_min", {"P": std.mass, "Q_E": [0.5, 0.5], "R": R}, resolution=4000)
        closed, _ = smoothing_distance_min(std, [0.5, 0.5], R)
        assert value >= closed - 1e-12
        assert value == pytest.approx(closed, abs=1e-3)


def test_simplex_grid_oracle_matches_chernoff(std):
    value, _ = grid_oracle("simplex_exponent", {"P": std.mass, "Rprime": 0.45}, resolution=120)
    closed, _ = chernoff_rate(std, 0.45)
    assert closed - 1e-9 <= value <= closed + 2e-2


def test_grid_oracle_limits():
    with pytest.raises(ValueError):
        grid_oracle("maxQ_H2", {"P": np.full((5, 1), 0.2)})
    with pytest.raises(ValueError):
        grid_oracle("nope", {"P": np.full((2, 1), 0.5)})


# ---------------------------------------------------------------- axioms


def test_Iprime_satisfies_axioms(rng):
    for _ in range(10):
        mass = rng.dirichlet(np.ones(12)).reshape(2, 3, 2)
        res = axiom_report(Iprime, mass, rng)
        assert max(res.values()) < 1e-10, res


def test_d1prime_breaks_chain_rule():
    """Point mass at (A, B) = (0, 0), E trivial.

    d1'(AB|E) = 0.75 + 3 * 0.25 = 1.5, d1'(B|E) = 1, d1'(A|B,E) = 1, so the gap is -0.5.
    """
    mass = np.zeros((2, 2, 1))
    mass[0, 0, 0] = 1.0
    assert chain_rule_gap(d1prime, mass) == pytest.approx(-0.5)
    assert chain_rule_gap(Iprime, mass) == pytest.approx(0.0, abs=1e-15)


def test_max_over_Q_grid_uniform_example(uniform22):
    value, Q = grid_oracle("maxQ_H2", {"P": uniform22.mass}, resolution=1000)
    assert value == pytest.approx(math.log(2))
    assert np.allclose(Q, [0.5, 0.5])


def test_coarse_simplex_grid_warns(std):
    with pytest.warns(UserWarning):
        grid_oracle("simplex_exponent", {"P": std.mass, "Rprime": 0.5}, resolution=20)
