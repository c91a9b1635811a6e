from .dataset import Dataset, IntervalDataset
from .survival_curve import SurvivalCurve, STEP, PIECEWISE_LINEAR
from .screening_result import ScreeningConfig, ScreeningResult, n_over_log_n
from .cox_gam_fit import SplineSpec, CoxGamFit, CumulativeHazard
from .iterative_trace import IterativeConfig, IterativeTrace, IterationRecord
from .scenario_spec import ScenarioSpec, GeneratedData
from .turnbull_fit import TurnbullFit
from .benchmark_report import BenchmarkReport

__all__ = [
    'Dataset', 'IntervalDataset', 'SurvivalCurve', 'STEP', 'PIECEWISE_LINEAR',
    'ScreeningConfig', 'ScreeningResult', 'n_over_log_n', 'SplineSpec', 'CoxGamFit',
    'CumulativeHazard', 'IterativeConfig', 'IterativeTrace', 'IterationRecord',
    'ScenarioSpec', 'GeneratedData', 'TurnbullFit', 'BenchmarkReport'
]
