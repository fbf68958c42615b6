"""Regional power-grid inertia from multi-sensor disturbance frequency records."""

from .errors import AnalysisError, DataQualityWarning
from .ingest import TraceBundle, load_bundle, load_event, load_region, parse_trace_file, regularize
from .metrics import InertiaEstimate, inertia_from_rocof, region_to_system_ratio, rocof_from_inertia
from .onset import OnsetResult, arrival_time, detect_onset
from .pipeline import analyze_event
from .preprocess import interconnection_frequency, regional_frequency, two_point_mean_filter
from .rocof import RocofEstimate, interconnection_rocof, local_rocof_sweep, peak_rocof
from .synth import GovernorSpec, SensorSpec, SynthSpec, default_sensors, generate, write_dataset
from .trace import (
    AnalysisResult,
    DisturbanceEvent,
    EventKind,
    FrequencyTrace,
    RegionDefinition,
    SystemConstants,
    validate_trace,
)

__version__ = "0.1.0"
