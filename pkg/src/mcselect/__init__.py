"""Model selection for pools of trained networks.

Single-criterion and multi-criteria (TOPSIS + Pareto) selection policies,
the fold schedule they run over, desk-scale candidate-pool generation, and
Wilcoxon-based policy comparison.
"""

from .core import (Activation, Architecture, CandidatePool, CandidateRecord,
                   Provenance, SetMetrics, validate_pool)
from .mcdm import (CriterionSpec, DecisionMatrix, Direction, pareto_filter,
                   topsis_rank)
from .policies import (AggregationId, PolicyId, criteria_of, select_global,
                       select_individual, select_local)
from .splitplan import (FoldAssignment, Role, RunSpec, SampleMask,
                        build_run_schedule, imbalance, masks_for,
                        stratified_kfold)
from .stats import (ComparisonMatrix, DisagreementReport, Symbol,
                    WilcoxonOutcome, comparison_matrix, disagreement,
                    wilcoxon_signed_rank)
from .synth import (NoisyTask, SyntheticCandidate, evaluate_selection_regret,
                    make_noisy_task, observed_accuracy)
from .trainer import TrainConfig, EpochTrace, generate_pool, train_candidate

__version__ = "0.1.0"
