"""Exact-arithmetic toolkit for balanced crossover designs: construction,
verification, information matrices and universal-optimality certificates."""

__version__ = "0.1.0"

from .kernels import BACKEND
from .ratmat import RationalMatrix, is_nnd, mp_inverse, rank, schur
from .design import CrossoverDesign, classify, format_design, parse_design, stats
from .catalog import TABLE1, fixture_4_3_12, patterson_params, verify_patterson, williams
from .infomat import effects_info, info_elim_subjects, info_full, is_connected, patterson_closed
from .symmetry import average_brute, average_closed, average_identity_holds
from .optimality import check_uo, efficiency, functional_A, spectrum_certificate

__all__ = [
    "BACKEND",
    "RationalMatrix",
    "is_nnd",
    "mp_inverse",
    "rank",
    "schur",
    "CrossoverDesign",
    "classify",
    "format_design",
    "parse_design",
    "stats",
    "TABLE1",
    "fixture_4_3_12",
    "patterson_params",
    "verify_patterson",
    "williams",
    "effects_info",
    "info_elim_subjects",
    "info_full",
    "is_connected",
    "patterson_closed",
    "average_brute",
    "average_closed",
    "average_identity_holds",
    "check_uo",
    "efficiency",
    "functional_A",
    "spectrum_certificate",
]
