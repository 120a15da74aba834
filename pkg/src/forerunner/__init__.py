"""Wave propagation from a sharp-onset source into an absorbing medium:
exact solution through the Faddeeva function, characteristic arrival times,
and grid solvers for the shutter and two-channel problems."""
from .faddeeva import FaddeevaOverflowError, erfcx, faddeeva_w
from .features import CharacteristicTimes, Method, characteristic_times, spectrogram, tau_S, tau_T, tau_T_curve
from .grid import GridConfig, TwoChannelParams, reduce_to_effective, shutter_evolve, two_channel_evolve
from .source import ComplexField, MediumParams, Provenance, SourceParams, derive_wave, exact_psi, oracle_psi

__all__ = [
    "FaddeevaOverflowError", "erfcx", "faddeeva_w",
    "CharacteristicTimes", "Method", "characteristic_times", "spectrogram", "tau_S", "tau_T", "tau_T_curve",
    "GridConfig", "TwoChannelParams", "reduce_to_effective", "shutter_evolve", "two_channel_evolve",
    "ComplexField", "MediumParams", "Provenance", "SourceParams", "derive_wave", "exact_psi", "oracle_psi",
]
