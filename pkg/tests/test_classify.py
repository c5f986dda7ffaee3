import numpy as np
import pytest

from ipmkit.classify import (
    LabeledSample,
    l_risk_check,
    lipschitz_margin_train,
    margin_bound_check,
    mean_distance_interpretation,
    parzen_train,
)
from ipmkit.core import GroundMetric, Kernel, SampleLabel, SampleSet, pool
from ipmkit.estimators import dudley, mmd, tv_empirical, wasserstein

L1 = GroundMetric.from_name("l1")
L2 = GroundMetric.from_name("l2")
GAUSS = Kernel.from_name("gaussian", 1.0)


def random_pool(rng, m, n, d=1, shift=0.8):
    sp = SampleSet(rng.normal(0.0, 1.0, (m, d)), SampleLabel.P)
    sq = SampleSet(rng.normal(shift, 1.0, (n, d)), SampleLabel.Q)
    return pool(sp, sq)


def test_labeled_sample_validation():
    with pytest.raises(ValueError):
        LabeledSample(np.array([[0.0], [1.0]]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        LabeledSample(np.array([[0.0]]), np.array([2.0]))
    ls = LabeledSample(np.array([[0.0], [1.0], [2.0]]), np.array([1.0, 1.0, -1.0]))
    assert ls.eps == pytest.approx(2 / 3)


def test_l_risk_negates_each_estimate():
    rng = np.random.default_rng(41)
    ps = random_pool(rng, 9, 12, d=2)
    for rep in (wasserstein(ps, L2), dudley(ps, L2), mmd(ps, GAUSS), tv_empirical(ps)):
        assert l_risk_check(ps, rep) == pytest.approx(-rep.value, abs=1e-7)


def test_l_risk_rejects_null_witness():
    pts = np.array([[0.0], [1.0]])
    ps = pool(SampleSet(pts, SampleLabel.P), SampleSet(pts, SampleLabel.Q))
    rep = mmd(ps, GAUSS)
    with pytest.raises(ValueError):
        l_risk_check(ps, rep)


def test_parzen_predicts_lone_positive():
    ls = LabeledSample(
        np.array([[0.0], [10.0], [11.0]]), np.array([1.0, -1.0, -1.0])
    )
    clf = parzen_train(ls, GAUSS)
    assert clf.predict(np.array([0.0]))[0] == 1.0


def test_parzen_tie_breaks_negative():
    ls = LabeledSample(np.array([[-1.0], [1.0]]), np.array([1.0, -1.0]))
    clf = parzen_train(ls, GAUSS)
    assert clf.predict(np.array([0.0]))[0] == -1.0


def test_parzen_boundary_near_midpoint():
    rng = np.random.default_rng(42)
    pos = rng.normal(0.0, 0.5, (40, 1))
    neg = rng.normal(4.0, 0.5, (40, 1))
    ls = LabeledSample(
        np.vstack([pos, neg]), np.concatenate([np.ones(40), -np.ones(40)])
    )
    clf = parzen_train(ls, GAUSS)
    assert clf.predict(np.array([0.5]))[0] == 1.0
    assert clf.predict(np.array([3.5]))[0] == -1.0


def test_parzen_scale_invariance():
    from ipmkit.core import KernelKind

    rng = np.random.default_rng(43)
    pts = rng.normal(size=(16, 2))
    labels = np.sign(pts[:, 0] + 0.1)
    labels[labels == 0] = 1.0
    ls = LabeledSample(pts, labels)
    base = parzen_train(ls, GAUSS)
    scaled_kernel = Kernel(
        kind=KernelKind.CUSTOM,
        func=lambda x, y: 3.7 * GAUSS.value(x, y),
        bound=3.7,
    )
    scaled = parzen_train(ls, scaled_kernel)
    xs = rng.normal(size=(30, 2))
    np.testing.assert_array_equal(base.predict(xs), scaled.predict(xs))


def test_mean_distance_symmetric_tie():
    ls = LabeledSample(np.array([[-1.0], [1.0]]), np.array([1.0, -1.0]))
    dp, dn = mean_distance_interpretation(ls, GAUSS, np.array([0.0]))
    assert dp == pytest.approx(dn, abs=1e-9)


def test_mean_distance_agrees_with_kernel_rule():
    # mirror-image classes give equal-norm class means, where the
    # nearer-mean rule and the kernel rule must coincide
    rng = np.random.default_rng(44)
    pos = rng.normal(1.0, 0.7, (10, 1))
    neg = -pos
    ls = LabeledSample(
        np.vstack([pos, neg]), np.concatenate([np.ones(10), -np.ones(10)])
    )
    clf = parzen_train(ls, GAUSS)
    for x in rng.uniform(-3, 3, size=(100, 1)):
        dp, dn = mean_distance_interpretation(ls, GAUSS, x)
        nearer = 1.0 if dp < dn else -1.0
        assert nearer == clf.predict(x)[0]


def test_margin_lp_hand_example():
    ls = LabeledSample(np.array([[0.0], [2.0]]), np.array([1.0, -1.0]))
    clf = lipschitz_margin_train(ls, L1)
    assert clf.margin == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_array_equal(clf.predict(ls.points), ls.labels)


def test_margin_scaling():
    ls1 = LabeledSample(np.array([[0.0], [2.0]]), np.array([1.0, -1.0]))
    ls2 = LabeledSample(np.array([[0.0], [4.0]]), np.array([1.0, -1.0]))
    m1 = lipschitz_margin_train(ls1, L1).margin
    m2 = lipschitz_margin_train(ls2, L1).margin
    assert m2 == pytest.approx(2.0 * m1, abs=1e-9)


def test_margin_training_accuracy_perfect():
    rng = np.random.default_rng(45)
    pts = rng.normal(size=(24, 2))
    labels = np.where(pts[:, 0] > 0, 1.0, -1.0)
    ls = LabeledSample(pts, labels)
    for bounded in (False, True):
        clf = lipschitz_margin_train(ls, L2, bounded=bounded)
        np.testing.assert_array_equal(clf.predict(pts), labels)


def test_margin_infeasible_conflicting_labels():
    ls = LabeledSample(np.array([[0.0], [0.0]]), np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        lipschitz_margin_train(ls, L1)


def test_margin_bound_hand_example():
    ls = LabeledSample(np.array([[0.0], [2.0]]), np.array([1.0, -1.0]))
    margin, bound, holds = margin_bound_check(ls, L1)
    assert margin == pytest.approx(1.0, abs=1e-9)
    assert bound == pytest.approx(1.0, abs=1e-9)  # W = 2 between the deltas
    assert holds


def test_margin_bounds_random_instances():
    rng = np.random.default_rng(46)
    for _ in range(20):
        m = int(rng.integers(3, 10))
        n = int(rng.integers(3, 10))
        pos = rng.normal(0.0, 1.0, (m, 2))
        neg = rng.normal(3.0, 1.0, (n, 2))
        ls = LabeledSample(
            np.vstack([pos, neg]), np.concatenate([np.ones(m), -np.ones(n)])
        )
        for bounded in (False, True):
            margin, bound, holds = margin_bound_check(ls, L2, bounded=bounded)
            assert holds, (margin, bound, bounded)


def test_classifier_json():
    ls = LabeledSample(np.array([[0.0], [2.0]]), np.array([1.0, -1.0]))
    clf = lipschitz_margin_train(ls, L1)
    obj = clf.to_json()
    assert obj["kind"] == "lipschitz-margin"
    assert obj["margin"] == pytest.approx(1.0, abs=1e-9)
    assert "anchors" in obj and "variant" in obj
