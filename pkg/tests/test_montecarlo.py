"""Estimators: interval coverage, verdict grading, content extrapolation
against exact boundary values, tail and median machinery, gradient integrals.
"""

import numpy as np
import pytest

from isoplab.fields import ConstantField, LinearRamp
from isoplab.geometry import (
    BallComplement,
    HalfSpace,
    PBallParams,
    coordinate_half_space,
    marginal_density,
)
from isoplab.montecarlo import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    RARE_COUNT,
    EstimateCI,
    bernoulli_ci,
    content_from_batch,
    estimate_content,
    estimate_measure,
    estimate_median_and_phi,
    estimate_tail,
    integrate_grad,
    mean_ci,
    verdict_geq,
    verdict_leq,
    write_estimates_csv,
)
from isoplab.sampling import ball_sampler, sample_ball


def test_estimate_ci_interval():
    e = EstimateCI(1.0, 0.1, 100)
    assert e.lo == pytest.approx(0.7)
    assert e.hi == pytest.approx(1.3)
    assert e.confidence == 0.997


def test_mean_ci_basics():
    e = mean_ci([2.0, 4.0, 6.0])
    assert e.mean == pytest.approx(4.0)
    assert e.std_err == pytest.approx(2.0 / np.sqrt(3.0))
    assert mean_ci([5.0]).std_err == 0.0
    with pytest.raises(ValueError):
        mean_ci([])


def test_bernoulli_ci_rare_floor():
    e = bernoulli_ci(0, 1000)
    assert e.mean == 0.0
    assert e.std_err > 0.0  # shrunk variance keeps rare events uncertain
    q = 0.5 / 1001
    assert e.std_err == pytest.approx(np.sqrt(q * (1 - q) / 1000))
    full = bernoulli_ci(1000, 1000)
    assert full.mean == 1.0 and full.std_err > 0.0
    mid = bernoulli_ci(300, 1000)
    assert mid.std_err == pytest.approx(np.sqrt(0.3 * 0.7 / 1000))
    with pytest.raises(ValueError):
        bernoulli_ci(5, 4)


def test_bernoulli_coverage():
    # 3-sigma intervals cover the true proportion in >= 99% of repetitions
    rng = np.random.default_rng(99)
    truth = 0.3
    hits = 0
    reps = 1000
    for _ in range(reps):
        k = rng.binomial(500, truth)
        e = bernoulli_ci(int(k), 500)
        hits += e.lo <= truth <= e.hi
    assert hits >= 0.99 * reps


def test_verdict_geq_strict_branches():
    assert verdict_geq(EstimateCI(1.0, 0.01, 10), 0.5) == PASS
    assert verdict_geq(EstimateCI(0.2, 0.01, 10), 0.5) == FAIL
    assert verdict_geq(EstimateCI(0.5, 0.05, 10), 0.5) == INCONCLUSIVE
    # exact equality with zero spread counts as PASS through the float tol
    assert verdict_geq(EstimateCI(0.5, 0.0, 10), 0.5) == PASS
    with pytest.raises(ValueError):
        verdict_geq(EstimateCI(1.0, 0.1, 10), 0.5, mode="bogus")


def test_verdict_geq_consistent_branches():
    assert verdict_geq(EstimateCI(0.45, 0.05, 10), 0.5, "consistent") == PASS
    assert verdict_geq(EstimateCI(0.2, 0.01, 10), 0.5, "consistent") == FAIL


def test_verdict_leq_mirrors_geq():
    assert verdict_leq(EstimateCI(0.2, 0.01, 10), 0.5) == PASS
    assert verdict_leq(EstimateCI(1.0, 0.01, 10), 0.5) == FAIL
    assert verdict_leq(EstimateCI(0.5, 0.05, 10), 0.5) == INCONCLUSIVE
    assert verdict_leq(EstimateCI(0.55, 0.05, 10), 0.5, "consistent") == PASS
    assert verdict_leq(EstimateCI(0.9, 0.01, 10), 0.5, "consistent") == FAIL
    # interval-valued right-hand sides participate in the tolerance
    assert verdict_leq(EstimateCI(0.5, 0.01, 10),
                       EstimateCI(0.8, 0.01, 10)) == PASS


def test_estimate_measure_half_space():
    params = PBallParams(2.0, 2)
    batch = sample_ball(params, 50000, seed=3)
    hs = coordinate_half_space(params, 0.3)
    est = estimate_measure(batch, hs)
    assert abs(est.mean - 0.3) <= 4.0 * est.std_err
    with pytest.raises(ValueError):
        estimate_measure(batch, HalfSpace(np.array([1.0, 0.0, 0.0]), 0.1))


def test_content_matches_exact_boundary_value():
    params = PBallParams(2.0, 2)
    sampler = ball_sampler(params)
    hs = coordinate_half_space(params, 0.5)
    ladder = [0.04, 0.02, 0.01, 0.005]
    est = estimate_content(sampler, hs, ladder, 200000, seed=11)
    # the sampler's params and the set's oracle meet: analytic = 2/pi
    assert est.analytic == pytest.approx(2.0 / np.pi)
    assert est.consistent_with_analytic()
    assert len(est.per_epsilon) == 4
    assert not est.inconclusive


def test_content_single_rung_and_quotient_values():
    params = PBallParams(2.0, 2)
    batch = sample_ball(params, 20000, seed=13)
    hs = coordinate_half_space(params, 0.25)
    one = content_from_batch(batch, hs, [0.02])
    assert one.extrapolated == one.per_epsilon[0][1]
    # quotient = (measure growth) / eps, by hand
    base = hs.indicator(batch.points).sum()
    grown = hs.enlarged(0.02).indicator(batch.points).sum()
    assert one.per_epsilon[0][1].mean == pytest.approx(
        (grown - base) / 20000 / 0.02)


def test_content_empty_enlargement_is_inconclusive():
    params = PBallParams(2.0, 2)
    batch = sample_ball(params, 1000, seed=17)
    far = HalfSpace(np.array([1.0, 0.0]), 5.0)
    est = content_from_batch(batch, far, [0.02, 0.01])
    assert est.inconclusive
    assert est.extrapolated.mean == 0.0


def test_content_ladder_validation():
    params = PBallParams(2.0, 2)
    batch = sample_ball(params, 100, seed=1)
    hs = coordinate_half_space(params, 0.5)
    for bad in ([], [0.0, -0.1], [0.01, 0.02], [0.02, 0.02]):
        with pytest.raises(ValueError):
            content_from_batch(batch, hs, bad)


def test_content_analytic_requires_value():
    params = PBallParams(1.5, 2)
    batch = sample_ball(params, 1000, seed=19)
    bc = BallComplement(0.5)  # no closed form away from p = 2
    est = content_from_batch(batch, bc, [0.02, 0.01],
                             analytic=bc.analytic_measure(params))
    assert est.analytic is None
    with pytest.raises(ValueError):
        est.consistent_with_analytic()


def test_estimate_tail_levels_and_rare_flag():
    params = PBallParams(2.0, 2)
    sampler = ball_sampler(params)
    norm = lambda X: np.linalg.norm(X, axis=1)
    pts = estimate_tail(sampler, norm, [0.5, 0.9999], 5000, seed=23)
    # exact radial law: P{|x| >= t} = 1 - t^2
    assert abs(pts[0].estimate.mean - 0.75) <= 4.0 * pts[0].estimate.std_err
    assert not pts[0].rare
    assert pts[1].rare  # expected count ~ 1
    with pytest.raises(ValueError):
        estimate_tail(sampler, norm, [np.inf], 100, seed=1)


def test_median_of_radius_on_the_disc():
    from isoplab.fields import EuclideanNorm
    params = PBallParams(2.0, 2)
    sampler = ball_sampler(params)
    med, curve = estimate_median_and_phi(sampler, EuclideanNorm(2),
                                         [0.0, 0.1], 40000, seed=29)
    # P{|x| <= t} = t^2, so the median radius is 1/sqrt(2)
    assert med.ci_lo <= 2.0 ** -0.5 <= med.ci_hi
    assert abs(med.value - 2.0 ** -0.5) < 0.01
    assert abs(curve[0].estimate.mean - 0.5) < 0.01  # phi(0) ~ 1/2
    assert curve[1].estimate.mean < 0.5


def test_lipschitz_spot_check_catches_liars():
    class Liar:
        vectorized = True
        lipschitz_constant = 1.0
        dim = 2

        def __call__(self, X):
            return 5.0 * np.asarray(X)[:, 0]

    sampler = ball_sampler(PBallParams(2.0, 2))
    with pytest.raises(ValueError):
        estimate_median_and_phi(sampler, Liar(), [0.0], 2000, seed=31)


def test_integrate_grad_exact_for_linear_ramp():
    # |grad| of a full-width ramp is constant, so the estimate is exact
    params = PBallParams(2.0, 2)
    sampler = ball_sampler(params)
    ramp = LinearRamp(np.array([1.0, 0.0]), -2.0, 2.0)
    est = integrate_grad(sampler, ramp, 2000, seed=37)
    assert est.mean == pytest.approx(0.25)
    assert est.std_err == 0.0
    sq = integrate_grad(sampler, ramp, 2000, seed=37, power=2)
    assert sq.mean == pytest.approx(0.0625)


def test_integrate_grad_drops_zero_gradient_fields():
    sampler = ball_sampler(PBallParams(2.0, 2))
    est = integrate_grad(sampler, ConstantField(2, 0.5), 500, seed=41)
    assert est.mean == 0.0


def test_integrate_grad_aborts_on_non_finite():
    class Broken:
        vectorized = True
        dim = 2

        def __call__(self, X):
            return np.zeros(len(X))

        def grad(self, X):
            return np.full_like(np.asarray(X, dtype=float), np.nan)

    sampler = ball_sampler(PBallParams(2.0, 2))
    with pytest.raises(RuntimeError):
        integrate_grad(sampler, Broken(), 1000, seed=43)


def test_estimates_csv_schema(tmp_path):
    path = tmp_path / "est.csv"
    rows = [("tail", 1.5, 4, 0.25, EstimateCI(0.125, 0.0125, 800), PASS)]
    write_estimates_csv(rows, path)
    text = path.read_text().splitlines()
    assert text[0] == "quantity,p,n,param,mean,std_err,n_samples,verdict"
    assert text[1] == "tail,1.5,4,0.25,0.125,0.0125,800,PASS"


def test_rare_count_constant():
    assert RARE_COUNT == 10
