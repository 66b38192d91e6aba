"""Univariate slice sampling with unbounded and positive reparameterizations."""

from .diagnostics import ReportOptions, RunReport, ess, ks_statistic, reference_cdf, summarize
from .errors import (
    ArgumentError,
    DomainError,
    EvaluationError,
    LookupFailure,
    ParseError,
    SliceboxError,
    StateError,
)
from .rng import RngStream
from .samplers import (
    ChainState,
    DrawRecord,
    Method,
    SamplerConfig,
    run_chain,
    slice_bounded,
    slice_positive,
    slice_unbounded,
    stepping_out,
)
from .targets import LogDensity, Support, builtin
from .transforms import Transform

__version__ = "0.1.0"
