"""Empirical integral probability metrics between two samples.

Estimate Wasserstein, Dudley, MMD and total-variation distances from
finite i.i.d. samples, extract the witness functions attaining them,
read them as binary classifiers, and benchmark convergence against
closed-form population values.
"""

from .core import (
    CostMatrix,
    CostSource,
    GroundMetric,
    Kernel,
    KernelKind,
    MetricKind,
    PooledSample,
    SampleLabel,
    SampleSet,
    cost_matrix,
    load_sample_csv,
    pool,
)
from .estimators import (
    EstimateReport,
    MetricName,
    dudley,
    kl_lower_bound,
    mmd,
    tv_empirical,
    tv_lower_bound_mmd,
    tv_lower_bound_wb,
    wasserstein,
)
from .witness import (
    Witness,
    WitnessVariant,
    bounded_lipschitz_extension,
    evaluate,
    lipschitz_extension,
    rkhs_witness,
)
from .classify import (
    Classifier,
    ClassifierKind,
    LabeledSample,
    l_risk_check,
    lipschitz_margin_train,
    margin_bound_check,
    mean_distance_interpretation,
    parzen_train,
)
from .oracles import (
    DistKind,
    ProductDistribution,
    dudley_population_discrete,
    mmd_population,
    sample,
    wasserstein_1d_cdf,
    wasserstein_population,
)
from .bench import ExperimentResult, ExperimentSpec, SweepKind, run, summarize, write_csv

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
