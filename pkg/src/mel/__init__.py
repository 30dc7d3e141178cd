"""Degree-level Euler classes of singular varieties.

Exact arithmetic in GW(k) for k = Q, R, F_p, a fragment of K_0(Var) with
its motivic measures, simplicial fans and toric varieties, good closures
of smooth varieties and the identities tying them together.
"""

from .errors import CrossCheckMismatch, InputError, MelError
from .gw import GF, QQ, RR, FieldDescriptor, GWElement, form_from_diagonal, hyperbolic, parse_gw
from .motive import POINT_COUNT, TOPOLOGICAL, MotiveClass, SeedTable, apply_measure, parse_class, quadratic

__version__ = "0.1.0"

__all__ = [
    "CrossCheckMismatch", "InputError", "MelError",
    "GF", "QQ", "RR", "FieldDescriptor", "GWElement", "form_from_diagonal", "hyperbolic", "parse_gw",
    "POINT_COUNT", "TOPOLOGICAL", "MotiveClass", "SeedTable", "apply_measure", "parse_class", "quadratic",
]
