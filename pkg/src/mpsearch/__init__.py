"""Moving-target search path planning with motion-encoded particle swarms."""

from .belief import (BeliefError, BeliefGrid, Cell, EvalResult, GridShape, SensorModel,
                     TargetMotionModel, collected_mass, evaluate_path,
                     evaluate_paths_unnormalized, gaussian_mixture_belief,
                     no_detection_update, normalization_factor, predict)
from .codec import (CellPath, MotionPath, MotionSegment, QuantizedMove, decode_path,
                    quantize_segment, random_motion_path)
from .fitness import PathEvaluator
from .optimizers import (ALGORITHMS, DEParams, Particle, RunRecord, SwarmConfig, run_algorithm,
                         run_apso, run_de, run_mpso, run_pso_node, update_velocity)
from .scenario import (Scenario, ScenarioError, builtin_scenario, builtin_scenarios,
                       export_scenario, load_scenario)

__version__ = "0.1.0"
