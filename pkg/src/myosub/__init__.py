"""Generative subspace search: learn a lens distribution over feature masks
under which the data looks the same, then use it for outlier ensembles."""

from ._backend import NAME as BACKEND
from .errors import InputError, TrainingError
from .experiments import (
    SyntheticSpec,
    attribute_lens,
    gen_synthetic_population,
    run_lens_experiment,
    run_od_benchmark,
    run_scalability,
)
from .generator import (
    GeneratorNet,
    TrainConfig,
    generator_forward,
    sample_lens,
    upper_softmax,
    vgan_loss_and_grad,
)
from .io import load_model, save_model
from .kernel_learning import AutoencoderNet, kl_loss_and_grads
from .kernel_mmd import (
    PAPER_EQ6,
    UNBIASED,
    KernelSpec,
    MmdEstimate,
    MmdTestResult,
    gaussian_kernel,
    median_heuristic,
    mmd2,
    myopicity_test,
    permutation_test,
)
from .lens import LensDistribution
from .od_ensemble import (
    LabeledSplit,
    OdScores,
    auc,
    ensemble_scores,
    feature_bagging_lens,
    knn_score,
    lof_score,
    one_class_split,
    project,
)
from .optim import AdadeltaState, adadelta_step
from .training import TrainResult, train_vgan

__version__ = "0.1.0"
