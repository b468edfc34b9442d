"""Exact rational kernel: linear algebra, simplex, cones, sign decisions."""
from .cones import (DIM_CAP, Cone, HCone, VCone, cone_from_generators, cone_from_rows,
                    cone_is_trivial, dd_convert, full_cone, polar, vrep_to_hrep, zero_cone)
from .forms import (SignDecision, homogeneous_sign_decide, nsd_on_subspace)
from .lp import linprog_exact, strict_lp_feasible

__all__ = [
    "DIM_CAP", "Cone", "HCone", "VCone", "cone_from_generators", "cone_from_rows",
    "cone_is_trivial", "dd_convert", "full_cone", "polar", "vrep_to_hrep", "zero_cone",
    "SignDecision", "homogeneous_sign_decide", "nsd_on_subspace",
    "linprog_exact", "strict_lp_feasible",
]
