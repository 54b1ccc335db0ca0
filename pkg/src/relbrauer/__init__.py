"""Brauer relations of G x C_p for finite abelian p-groups G."""

from .burnside import BurnsideElement, induft, product
from .errors import (
    NoCertificate,
    NotARelation,
    ParseError,
    RelBrauerError,
    ValidationError,
    VerificationFailure,
)
from .groups import GroupSpec, abelian_family, parse_group_spec
from .lattice import all_subgroups, ambient, build_selection_list, resolutions
from .rational import f_matrix, perm_character
from .relations import classified_generators, context, decompose_relation, kernel_relative, kprime
from .verify import kahn_report, verify_main_theorem

__version__ = "0.1.0"
