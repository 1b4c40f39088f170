"""Tri-state checkers for the recurrence conditions and the equivalence cross-check."""
from .common import Budget, aggregate, sample_points, scan_radius
from .crosscheck import CONDITIONS, EquivalenceReport, clopen_battery, cross_check_equivalences
from .recurrence import (battery_cones, check_ap, check_recurrence_type1, check_recurrence_type2,
                         check_regularly_ap)
from .structure import (QuotientSystem, RoWitness, UStarResult, check_distal, check_equicontinuous,
                        check_locally_weakly_ap, check_minimal_decomposition, check_orbit_map_usc,
                        check_ro_closed, compute_u_star, quotient_by_orbit_closure)

__all__ = [
    "Budget", "CONDITIONS", "EquivalenceReport", "QuotientSystem", "RoWitness", "UStarResult", "aggregate",
    "battery_cones", "check_ap", "check_distal", "check_equicontinuous", "check_locally_weakly_ap",
    "check_minimal_decomposition", "check_orbit_map_usc", "check_recurrence_type1", "check_recurrence_type2",
    "check_regularly_ap", "check_ro_closed", "clopen_battery", "compute_u_star", "cross_check_equivalences",
    "quotient_by_orbit_closure", "sample_points", "scan_radius",
]
