"""Maxwell-Bloch simulator for two-photon paired superradiance."""
from .params import DerivedParams, MediumParams, derive, flux_to_amplitude, amplitude_to_flux, two_color
from .bloch import BlochVector, GratingBloch, LocalFields, dark_state
from .solver import (InstabilityError, ResolutionWarning, RunRecord, Scenario, TriggerSpec,
                     delay_time, peak_flux, released_fraction, run)
from .conservation import ConservationReport, report
from .soliton import SolitonProfile, integrate_profile, winding_number
from .pulse import PulseShape, area_equation_solve, compression_factor, pulse_area, split_count
from .config import ConfigError, emit_config, parse_config, preset
from .sweep import sweep

__version__ = "0.1.0"
