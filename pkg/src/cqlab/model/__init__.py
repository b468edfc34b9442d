"""Problem model: maps, multi-indices, analytic sets and instances."""
from .instance import GmpInstance, load_problem, load_problem_text, make_instance, prototype_set
from .maps import ORDER_CAP, build_map
from .multiindex import MultiIndex, delta_p, delta_q, is_admissible, parse_delta

__all__ = [
    "GmpInstance", "load_problem", "load_problem_text", "make_instance", "prototype_set",
    "ORDER_CAP", "build_map",
    "MultiIndex", "delta_p", "delta_q", "is_admissible", "parse_delta",
]
