"""Coded distributed computing over a star network, with exact load accounting."""
from .combinatorics import enumerate_subsets, subset_rank, subset_unrank
from .errors import DecodeError, ParameterError, RegimeError, SchemeError
from .geometry import (
    convex_envelope_curves,
    is_pareto,
    locate_facet,
    pareto_points,
    surface_value,
)
from .bounds import extract_stats, lemma1_bound, lemma2_check, plane_bounds
from .scheme import FileStore, IvId, JobSpec, build_scheme, minimal_feasible
from .sim import LoadReport, execute, run_forwarding, run_mixture, trace

__version__ = "0.1.0"
