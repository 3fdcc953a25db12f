"""Generators and verifiers for the hardness reductions around PA minimisation."""
from .cnf import Cnf3, CnfError, parse_dimacs, random_cnf3, to_dimacs, unsat_cube_formula
from .etr import EtrFormula, EtrParseError, emit_etr, expected_variable_count, parse_smtlib
from .hull import HullCertificate, hull_cover, hull_membership
from .hypercube import (
    HypercubeFormatError,
    HypercubeInstance,
    load_instance,
    load_points,
    restrict,
    sat_to_hypercube,
    witness_from_assignment,
)
from .pa import InvalidWitnessError, hypercube_to_pa, pa_from_witness

__all__ = [
    "Cnf3",
    "CnfError",
    "EtrFormula",
    "EtrParseError",
    "HullCertificate",
    "HypercubeFormatError",
    "HypercubeInstance",
    "InvalidWitnessError",
    "emit_etr",
    "expected_variable_count",
    "hull_cover",
    "hull_membership",
    "hypercube_to_pa",
    "load_instance",
    "load_points",
    "pa_from_witness",
    "parse_dimacs",
    "parse_smtlib",
    "random_cnf3",
    "restrict",
    "sat_to_hypercube",
    "to_dimacs",
    "unsat_cube_formula",
    "witness_from_assignment",
]
