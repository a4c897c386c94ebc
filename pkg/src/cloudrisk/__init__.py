"""Multi-criteria cloud security risk assessment.

Pairwise-comparison weighting with consistency validation, fuzzy
comprehensive evaluation of expert ballots and measurements, provider
ranking, and weight-perturbation sensitivity analysis.
"""

from .ahp import (ConsistencyReport, ConvergenceError, JudgmentMatrix,
                  MatrixError, WeightVector, build_matrix, consistency,
                  derive_weights, lambda_max, matrix_from_rows,
                  synthesize_global_weights)
from .assessment import (AssessmentResult, EvaluationError,
                         InconsistentMatrixError, MissingDataError, Ranking,
                         SensitivityReport, evaluate_all, evaluate_provider,
                         perturb_weights, rank_providers, resolve_weights,
                         sensitivity_report)
from .formats import (DocumentError, Report, attach_ballots, emit_ballots_csv,
                      emit_project, emit_report, load_project,
                      parse_ballots_csv, parse_project, parse_report)
from .fuzzy import (FuzzyError, MembershipMatrix, MembershipVector,
                    ballot_membership, compose, defuzzify_level, normalize,
                    score, threshold_membership)
from .model import (Diagnostic, ExpertBallot, Hierarchy, Measurement, Node,
                    Project, Provider, RatingScale, ScaleLevel, default_hierarchy,
                    default_scale, validate_project)

__version__ = "0.1.0"
