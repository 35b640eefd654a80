"""Sequential Bayesian test planning for accelerated life tests.

Workflow in one breath: describe the test conditions (TestConfig) and the
prior (PriorSpec), seed a DesignSession with any existing observations,
then alternate plan_next / record_observation until the schedule is spent;
fit_mle and weighted_avar summarize what the campaign bought.  The harness
module replays whole campaigns against a known truth to compare
D-to-C switching strategies.
"""

from .design import (CandidateSet, CandidateTable, Criterion, DesignSession,
                     RunRecord, Schedule, bayes_c_criterion,
                     bayes_d_criterion, evaluate_candidates, load_session,
                     next_point, plan_next, record_observation, save_session)
from .distributions import (DistributionFamily, std_cdf, std_logpdf,
                            std_logsf, std_pdf, std_quantile, std_sf)
from .errors import (AltseqError, CampaignCompleteError, CriterionError,
                     DomainError, EstimationError, InsufficientDataError,
                     NumericalError, PlanningError, SamplerError, SchemaError,
                     SingularMatrixError, ValidationError)
from .fatigue import (ModelParams, TestConfig, log_quantile_life, mu, mu_grad,
                      psi_of_r, stress_factor)
from .fisher import (UseProfile, c_vector, info_matrix, invert_info,
                     std_unit_info, unit_info, update_info, weighted_avar)
from .harness import (StrategySpec, StudyConfig, StudyResult, TruthSpec,
                      default_study, m_measure, run_study, run_trial,
                      simulate_lifetime, write_study_csvs)
from .kernels import BACKEND
from .likelihood import (Dataset, FitReport, Observation, ParamBounds,
                         fit_mle, log_likelihood)
from .posterior import (McmcSettings, PosteriorDraws, PriorSpec,
                        bounds_from_prior, sample_posterior)

__version__ = "0.1.0"
