"""Adaptive control of a tendon-sheath driven joint with friction and hysteresis."""

from .controller import AdaptiveState, ControllerGains, ReferenceTrajectory
from .engine import DivergenceError, RunMetrics, mse, run_scenario
from .estimation import EncoderModel, EstimatorParams, EstimatorState
from .friction import ActuatorSignal, FrictionParams, FrictionState
from .plant import DisturbanceModel, PlantParams, PlantState
from .scenario import ConfigError, ScenarioConfig, load_config
from .stability import check_decrease

__version__ = "0.1.0"
