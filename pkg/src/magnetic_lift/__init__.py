"""Exact Fourier expansions of additive theta lifts and divisibility certificates for magnetic modular forms."""

from .arith import CyclotomicNumber, Verdict
from .lattice import EvenLattice, builtin, cusp_data
from .lift import LiftProblem, check_magnetic, coefficient, constant_term, expand, ray_coefficients
from .qseries import FourierSeries, PrecisionError
from .vvmf import VVModularForm, bol, check_input_divisibility, from_scalar
from .weil import WeilRep

__all__ = [
    "CyclotomicNumber",
    "EvenLattice",
    "FourierSeries",
    "LiftProblem",
    "PrecisionError",
    "VVModularForm",
    "Verdict",
    "WeilRep",
    "bol",
    "builtin",
    "check_input_divisibility",
    "check_magnetic",
    "coefficient",
    "constant_term",
    "cusp_data",
    "expand",
    "from_scalar",
    "ray_coefficients",
]
