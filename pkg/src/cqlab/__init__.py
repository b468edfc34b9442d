"""Constraint-qualification verification for disjunctive programs."""

__version__ = "0.1.0"

from .checks import Verdict, check_all, run_request  # noqa: E402
from .model import load_problem, make_instance, prototype_set  # noqa: E402

__all__ = ["__version__", "Verdict", "check_all", "run_request", "load_problem", "make_instance",
           "prototype_set"]
