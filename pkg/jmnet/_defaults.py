"""
Contains default values that can be replaced by the user inside other modules.
"""

#: Tolerance for algebraic identities of exact constructions.
EXACT_TOL = 1e-12

#: Tolerance for round trips through eigen-decompositions and orthonormality checks.
ROUND_TRIP_TOL = 1e-10

#: Tolerance for normalization of correlation tables and inequality boundaries.
TABLE_TOL = 1e-9

#: Lowest eigenvalue accepted for a density matrix.
EIGENVALUE_FLOOR = -1e-10

#: Tolerance for unit Bloch vectors passed to `ket_from_bloch`.
UNIT_TOL = 1e-9

DEFAULT_CONVENTION = "invariant_first"

DEFAULT_FIT = {
    "max_cardinality": 8,
    "min_cardinality": 2,
    "restarts": 64,
    "max_iterations": 2000,
    "seed": 0,
    "distance": "total_variation",
    "tolerance": 1e-10,
    "n_jobs": 1,
}
