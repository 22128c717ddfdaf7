"""Steady states, photon currents and counting statistics of a nonlinear
oscillator weakly coupled to an arbitrary mix of classical and quantum
noise sources, in the rotating-wave weak-coupling (Redfield) description.
"""

__version__ = "0.1.0"

from .correlations import (CoherenceSystem, CorrelationSeries, SpectrumPeak,
                           SpectrumResult, build_coherence_system, g1_tau,
                           g2_tau, g2_zero, spectrum)
from .errors import (ConfigError, NoisyKerrError, NumericsError, PhysicsError,
                     PhysicsWarning, TruncationWarning)
from .noise import NoiseComponent, NoiseModel
from .oracle import (Liouvillian, build_liouvillian, regression_correlator)
from .oscillator import OscillatorModel, choose_truncation
from .redfield import (CurrentReport, PopulationDistribution,
                       RedfieldCoefficients, currents, evolve_populations,
                       ness, principal_value_shift, rate_matrix)

__all__ = [
    "__version__",
    "CoherenceSystem", "CorrelationSeries", "SpectrumPeak", "SpectrumResult",
    "build_coherence_system", "g1_tau", "g2_tau", "g2_zero", "spectrum",
    "ConfigError", "NoisyKerrError", "NumericsError", "PhysicsError",
    "PhysicsWarning", "TruncationWarning",
    "NoiseComponent", "NoiseModel",
    "Liouvillian", "build_liouvillian", "regression_correlator",
    "OscillatorModel", "choose_truncation",
    "CurrentReport", "PopulationDistribution", "RedfieldCoefficients",
    "currents", "evolve_populations", "ness", "principal_value_shift",
    "rate_matrix",
]
