"""Lipschitz moduli and Fourier-tail equivalence for radial functions on R^n, H^2 and H^3."""

from . import equivalence, functionals, modulus, profiles, spaces
from .equivalence import Verdict, equivalence_report, power_family, titchmarsh_n1
from .errors import TitchmarshError
from .functionals import lipschitz_curve, tail_curve
from .modulus import Modulus, ZygmundKind, mo_indices, power, power_log, zygmund_check
from .spaces import SpectralSpace, plancherel_check, spherical_transform

__version__ = "0.1.0"

__all__ = [
    "equivalence", "functionals", "modulus", "profiles", "spaces",
    "Verdict", "equivalence_report", "power_family", "titchmarsh_n1", "TitchmarshError",
    "lipschitz_curve", "tail_curve", "Modulus", "ZygmundKind", "mo_indices", "power",
    "power_log", "zygmund_check", "SpectralSpace", "plancherel_check", "spherical_transform",
]
