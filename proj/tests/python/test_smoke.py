"""Smoke tests for the python bindings."""

import math

import pytest

import fisherspike as fsp


@pytest.fixture
def bulk():
    return fsp.SpectralMeasure([1.0, 2.0], [0.5, 0.5])


@pytest.fixture
def ratios():
    return fsp.AspectRatios(0.5, 0.25)


def test_psi_and_derivative(bulk, ratios):
    assert fsp.psi(10.0, bulk, ratios) == pytest.approx(15.4679802955665, rel=1e-12)
    assert fsp.psi(0.1, bulk, ratios) == pytest.approx(0.04498567335243553, rel=1e-12)
    assert fsp.psi_prime(3.0, bulk, fsp.AspectRatios(0.0, 0.0)) == 1.0
    assert fsp.condition_ii(10.0, bulk, ratios) == pytest.approx(0.650366512345679)
    with pytest.raises(fsp.AtomCollision):
        fsp.psi(2.0, bulk, ratios)


def test_classification(bulk, ratios):
    cls = fsp.phase_transition_limit(10.0, bulk, ratios)
    assert cls.kind == fsp.SpikeKind.Distant
    assert cls.critical_point is None
    assert cls.limit == pytest.approx(15.4679802955665)

    one = fsp.SpectralMeasure.point_mass(1.0)
    close = fsp.phase_transition_limit(0.5, one, ratios)
    assert close.kind == fsp.SpikeKind.CloseAbove
    assert close.critical_point == pytest.approx(0.2792407799438735, rel=1e-6)

    assert fsp.is_distant_spike(10.0, bulk, ratios, 0.05)
    assert not fsp.is_distant_spike(2.0, bulk, ratios, 0.05)


def test_support(bulk, ratios):
    sup = fsp.lsd_support(fsp.SpectralMeasure.point_mass(1.0), ratios)
    assert len(sup.intervals) == 1
    lo, hi = sup.intervals[0]
    assert lo == pytest.approx(0.07797541318366283, rel=1e-6)
    assert hi == pytest.approx(5.699802364594115, rel=1e-6)
    assert sup.contains(1.0)
    assert not sup.contains(6.0)


def test_companion_roots(bulk, ratios):
    x = fsp.psi(10.0, bulk, ratios)
    root = fsp.solve_m0(x, bulk, ratios)
    assert root.m0 == pytest.approx(-10.0, abs=1e-8)
    pair = fsp.population_m_pair(x, bulk, ratios)
    assert 1.0 + 0.25 * x * pair.m + pair.m_underline * 10.0 == pytest.approx(0.0, abs=1e-8)
    with pytest.raises(fsp.NotOutsideSupport):
        fsp.solve_m0(3.0, bulk, ratios)


def test_estimators():
    sample = fsp.EigenSample([5.0, 1.0, 0.9, 0.5], 8, 16)
    mh = fsp.empirical_m_hat(sample, 1)
    assert mh.m_hat == pytest.approx(-0.2387082204155375, rel=1e-13)
    assert mh.excluded == [1]
    assert fsp.estimate_spike_at(sample, 1) == pytest.approx(3.6184366363995264, rel=1e-13)
    group = fsp.estimate_spike_group(sample, [2, 3])
    assert group.successes == 2
    assert group.pooled == pytest.approx(sum(group.per_rank) / 2.0)


def test_sampling_shapes():
    lam = fsp.build_lambda(8)
    assert lam == [10.0, 7.5, 7.5, 2.0, 1.0, 0.2, 0.2, 0.1]
    with pytest.raises(fsp.BadDimension):
        fsp.build_lambda(7)

    u = fsp.toeplitz_eigvecs(4, 0.5)
    assert u.shape == (4, 4)

    spec = fsp.PopulationSpec(8, 0.5, lam)
    rng = fsp.StreamRng(7, 0)
    sample = fsp.fisher_eigenvalues(spec, fsp.EntryDistribution.StandardNormal, 16, 32, rng)
    assert sample.p == 8
    assert sample.values == sorted(sample.values, reverse=True)
    assert all(v >= 0 for v in sample.values)

    rng2 = fsp.StreamRng(7, 0)
    sample2 = fsp.fisher_eigenvalues(spec, fsp.EntryDistribution.StandardNormal, 16, 32, rng2)
    assert sample.values == sample2.values


def test_monte_carlo(tmp_path):
    cfg = fsp.SimulationConfig()
    cfg.p = 50
    cfg.reps = 4
    cfg.master_seed = 7
    cfg.out_dir = str(tmp_path / "out")
    report = fsp.run_monte_carlo(cfg)
    assert report.successful_reps == 4
    assert len(report.per_spike) == 4
    assert (tmp_path / "out" / "summary.csv").exists()
    assert (tmp_path / "out" / "replications.csv").exists()
    for agg in report.per_spike:
        assert sum(agg.histogram.counts) == agg.count
        assert math.isfinite(agg.mean)
