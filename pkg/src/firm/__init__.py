"""Feature importance ranking via conditional expected scores.

The importance of a feature is the standard deviation of the expected
score conditional on the feature's value. Exact formulas are provided for
binary features, normal models, and positional oligomers over sequences;
a binned estimator covers arbitrary samples.
"""

from .binary import (PointDistribution, firm_binary_empirical_matrix,
                     firm_binary_exact, firm_binary_values,
                     firm_uniform_conjunction, poim_firm_conversion)
from .dataset import (CovarianceEstimate, SequenceDataset, TabularDataset,
                      empirical_covariance, load_sequences, load_tabular,
                      save_tabular, shrinkage_covariance)
from .empirical import (ConditionalScoreCurve, conditional_curve, default_bins,
                        firm_from_curve, firm_slope, slope_stderr)
from .errors import (BudgetExceededError, DataFormatError,
                     DegenerateFeatureError, FirmError)
from .features import (BinaryValues, PositionalOligomer, Projection,
                       SignedConjunction, Threshold, Xor, evaluate,
                       evaluate_rows, is_binary, parse_feature)
from .gaussian import (GaussianModel, conditional_mean,
                       firm_gaussian_general, firm_gaussian_linear,
                       firm_regression_closed_form, sensitivity_index)
from .results import BinaryStats, FirmResult
from .scoring import (KernelExpansionScorer, KernelSpec, LabelOracleScorer,
                      LinearScorer, PositionalKmerScorer, gradient_at,
                      gradient_at_zero, score, score_many, scorer_from_json,
                      scorer_to_json, standardize, train_kernel_ridge,
                      train_least_squares, train_positional_kmer, train_ridge)
from .sequence import (MarkovBackground, PoimTable, conditional_expected_score,
                       expected_score, hamming_ball, poim, ranked_oligomers)

__version__ = "0.1.0"
