import math

import numpy as np
import pytest

from ipmkit.core import GroundMetric, Kernel, SampleLabel, SampleSet, pool
from ipmkit.estimators import wasserstein
from ipmkit.oracles import (
    DistKind,
    ProductDistribution,
    dudley_population_discrete,
    mmd_population,
    sample,
    wasserstein_1d_cdf,
    wasserstein_population,
)

L1 = GroundMetric.from_name("l1")

EX2_D1 = (
    ProductDistribution(DistKind.TRUNC_EXP, 1, {"rate": 3, "trunc": 5}),
    ProductDistribution(DistKind.TRUNC_EXP, 1, {"rate": 1, "trunc": 5}),
)
EX5 = (
    ProductDistribution(
        DistKind.DISCRETE,
        1,
        {"support": [0, 1, 2, 3, 4], "probs": [1 / 3, 1 / 6, 1 / 8, 1 / 4, 1 / 8]},
    ),
    ProductDistribution(
        DistKind.DISCRETE, 1, {"support": [2, 3, 4, 5], "probs": [0.25] * 4}
    ),
)


def test_uniform_population_values():
    p = ProductDistribution(DistKind.UNIFORM, 1, {"low": -0.5, "high": 0.5})
    q = ProductDistribution(DistKind.UNIFORM, 1, {"low": 0.0, "high": 1.0})
    assert wasserstein_population(p, q) == pytest.approx(0.5)
    p5 = ProductDistribution(DistKind.UNIFORM, 5, {"low": -0.5, "high": 0.5})
    q5 = ProductDistribution(DistKind.UNIFORM, 5, {"low": 0.0, "high": 1.0})
    assert wasserstein_population(p5, q5) == pytest.approx(2.5)


def test_truncexp_population_values():
    assert wasserstein_population(*EX2_D1) == pytest.approx(0.6327, abs=5e-4)
    p5 = ProductDistribution(
        DistKind.TRUNC_EXP, 5, {"rate": [3, 2, 0.5, 2, 7], "trunc": [5, 6, 3, 2, 10]}
    )
    q5 = ProductDistribution(
        DistKind.TRUNC_EXP, 5, {"rate": [1, 5, 2.5, 1, 8], "trunc": [5, 6, 3, 2, 10]}
    )
    assert wasserstein_population(p5, q5) == pytest.approx(1.9149, abs=5e-4)


def test_population_zero_on_equal_pairs():
    p = ProductDistribution(DistKind.UNIFORM, 2, {"low": 0.0, "high": 1.0})
    assert wasserstein_population(p, p) == 0.0
    g = ProductDistribution(DistKind.GAUSSIAN, 2, {"mean": 0.3, "std": 1.1})
    assert mmd_population(g, g, Kernel.from_name("gaussian", 1.0)) == pytest.approx(
        0.0, abs=1e-12
    )
    e = ProductDistribution(DistKind.EXPONENTIAL, 1, {"rate": 2.0})
    assert mmd_population(e, e, Kernel.from_name("laplacian", 0.25)) == pytest.approx(
        0.0, abs=1e-12
    )


def test_population_additive_over_dimensions():
    vals = []
    for lam, mu, c in ((3, 1, 5), (2, 5, 6), (0.5, 2.5, 3)):
        p = ProductDistribution(DistKind.TRUNC_EXP, 1, {"rate": lam, "trunc": c})
        q = ProductDistribution(DistKind.TRUNC_EXP, 1, {"rate": mu, "trunc": c})
        vals.append(wasserstein_population(p, q))
    p3 = ProductDistribution(
        DistKind.TRUNC_EXP, 3, {"rate": [3, 2, 0.5], "trunc": [5, 6, 3]}
    )
    q3 = ProductDistribution(
        DistKind.TRUNC_EXP, 3, {"rate": [1, 5, 2.5], "trunc": [5, 6, 3]}
    )
    assert wasserstein_population(p3, q3) == pytest.approx(sum(vals), abs=1e-12)


def test_unsupported_pairs_rejected():
    u = ProductDistribution(DistKind.UNIFORM, 1, {"low": 0.0, "high": 1.0})
    g = ProductDistribution(DistKind.GAUSSIAN, 1, {"mean": 0.0, "std": 1.0})
    with pytest.raises(ValueError):
        wasserstein_population(u, g)
    with pytest.raises(ValueError):
        mmd_population(u, g, Kernel.from_name("gaussian", 1.0))


def test_gaussian_mmd_population_formula():
    p = ProductDistribution(DistKind.GAUSSIAN, 1, {"mean": 0.0, "std": math.sqrt(2)})
    q = ProductDistribution(DistKind.GAUSSIAN, 1, {"mean": 1.0, "std": math.sqrt(2)})
    expect = 5.0 ** (-0.25) * math.sqrt(2.0 - 2.0 * math.exp(-0.1))
    got = mmd_population(p, q, Kernel.from_name("gaussian", 1.0))
    assert got == pytest.approx(expect, abs=1e-12)


def test_exponential_mmd_population_values():
    p1 = ProductDistribution(DistKind.EXPONENTIAL, 1, {"rate": 3.0})
    q1 = ProductDistribution(DistKind.EXPONENTIAL, 1, {"rate": 1.0})
    lap = Kernel.from_name("laplacian", 0.25)
    assert mmd_population(p1, q1, lap) == pytest.approx(0.2481, abs=5e-4)
    p5 = ProductDistribution(DistKind.EXPONENTIAL, 5, {"rate": [3, 2, 0.5, 2, 7]})
    q5 = ProductDistribution(DistKind.EXPONENTIAL, 5, {"rate": [1, 5, 2.5, 1, 8]})
    assert mmd_population(p5, q5, lap) == pytest.approx(0.3892, abs=5e-4)


def test_dudley_discrete_reference_value():
    assert dudley_population_discrete(*EX5, L1) == pytest.approx(0.5278, abs=5e-4)


def test_dudley_discrete_zero_on_equal():
    p, _ = EX5
    assert dudley_population_discrete(p, p, L1) == pytest.approx(0.0, abs=1e-12)


def test_dudley_two_atoms_grid_search():
    # brute-force the tiny program over (a1, a2, b, c) with b + c <= 1
    p = ProductDistribution(DistKind.DISCRETE, 1, {"support": [0.0], "probs": [1.0]})
    q = ProductDistribution(DistKind.DISCRETE, 1, {"support": [0.5], "probs": [1.0]})
    got = dudley_population_discrete(p, q, L1)
    # for fixed (b, c) the inner maximum of a1 - a2 is min(2c, b * rho);
    # scan the (b, c) simplex on a 1e-3 grid
    rho = 0.5
    bs = np.arange(0.0, 1.0 + 1e-12, 1e-3)
    cs = 1.0 - bs  # more of either budget never hurts: the cap binds
    best = float(np.minimum(2.0 * cs, bs * rho).max())
    assert got == pytest.approx(best, abs=1e-3)
    assert got == pytest.approx(0.4, abs=1e-9)


def test_sampling_supports():
    u = ProductDistribution(DistKind.UNIFORM, 2, {"low": 0.0, "high": 1.0})
    s = sample(u, 500, seed=1)
    assert np.all((s.points >= 0.0) & (s.points <= 1.0))
    te = ProductDistribution(DistKind.TRUNC_EXP, 1, {"rate": 3.0, "trunc": 5.0})
    st = sample(te, 500, seed=1)
    assert np.all((st.points >= 0.0) & (st.points <= 5.0))
    d = ProductDistribution(
        DistKind.DISCRETE, 1, {"support": [0, 1, 2], "probs": [0.2, 0.3, 0.5]}
    )
    sd = sample(d, 200, seed=1)
    assert set(np.unique(sd.points)).issubset({0.0, 1.0, 2.0})


def test_sampling_law_of_large_numbers():
    u = ProductDistribution(DistKind.UNIFORM, 1, {"low": 0.0, "high": 1.0})
    s = sample(u, 100_000, seed=5)
    assert s.points.mean() == pytest.approx(0.5, abs=0.01)
    g = ProductDistribution(DistKind.GAUSSIAN, 1, {"mean": 2.0, "std": 1.0})
    sg = sample(g, 100_000, seed=5)
    assert sg.points.mean() == pytest.approx(2.0, abs=0.02)
    assert sg.points.std() == pytest.approx(1.0, abs=0.02)


def test_sampling_deterministic():
    te = ProductDistribution(DistKind.TRUNC_EXP, 3, {"rate": 2.0, "trunc": 4.0})
    a = sample(te, 64, seed=7, trial=3)
    b = sample(te, 64, seed=7, trial=3)
    assert np.array_equal(a.points, b.points)
    c = sample(te, 64, seed=7, trial=4)
    assert not np.array_equal(a.points, c.points)


def test_cdf_area_trivial_cases():
    s0 = SampleSet(np.array([[0.0]]), SampleLabel.P)
    s3 = SampleSet(np.array([[3.0]]), SampleLabel.Q)
    assert wasserstein_1d_cdf(s0, s3) == pytest.approx(3.0)
    same = SampleSet(np.array([[1.0], [2.0]]), SampleLabel.P)
    assert wasserstein_1d_cdf(same, SampleSet(same.points, SampleLabel.Q)) == 0.0


def test_cdf_area_matches_lp():
    rng = np.random.default_rng(51)
    for _ in range(20):
        m = int(rng.integers(2, 40))
        n = int(rng.integers(2, 40))
        sp = SampleSet(rng.normal(0, 1, (m, 1)), SampleLabel.P)
        sq = SampleSet(rng.normal(0.5, 1.2, (n, 1)), SampleLabel.Q)
        lp_val = wasserstein(pool(sp, sq), L1).value
        cdf_val = wasserstein_1d_cdf(sp, sq)
        assert lp_val == pytest.approx(cdf_val, abs=1e-6)


def test_parameter_validation():
    with pytest.raises(ValueError):
        ProductDistribution(DistKind.UNIFORM, 1, {"low": 1.0, "high": 0.0})
    with pytest.raises(ValueError):
        ProductDistribution(DistKind.TRUNC_EXP, 1, {"rate": -1.0, "trunc": 1.0})
    with pytest.raises(ValueError):
        ProductDistribution(
            DistKind.DISCRETE, 1, {"support": [0, 1], "probs": [0.5, 0.6]}
        )


def test_json_round_trip():
    p = ProductDistribution(DistKind.GAUSSIAN, 2, {"mean": [0.0, 1.0], "std": 1.0})
    back = ProductDistribution.from_json(p.to_json())
    assert back.kind is DistKind.GAUSSIAN and back.d == 2
    np.testing.assert_allclose(back.params["mean"], [0.0, 1.0])
