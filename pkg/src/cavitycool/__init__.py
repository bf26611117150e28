"""Raman sideband cooling, cavity state detection and sideband thermometry for one trapped atom."""

__version__ = "0.1.0"

from .physics import (AtomState, CavityConfig, MotionalDistribution, TrapConfig,  # noqa: F401
                      carrier_rabi, critical_numbers, ground_state_size, lamb_dicke,
                      sideband_rabi, thermal_distribution, zeeman_shift,
                      zero_point_temperature)
from .cooling import (CoolingConfig, RateMatrix, build_rate_matrix, evolve,  # noqa: F401
                      sideband_ratio_prediction, steady_state_nbar)
from .detection import (Classification, DetectionConfig, classify,  # noqa: F401
                        confusion_matrix, presence_check, simulate_probe_window)
from .spectroscopy import (SpectrumPoint, TrialConfig, TrialRecord,  # noqa: F401
                           acquire_spectrum, prepare_f3, raman_transfer_probability,
                           run_trial)
from .analysis import (AnalysisResult, LorentzianFit, fit_lorentzian,  # noqa: F401
                       infer_nbar, sideband_ratio, subtract_background)
