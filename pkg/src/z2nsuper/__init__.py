"""Z_2^n-graded, Z_2^n-commutative formal power series in truncated quotients."""

from .errors import (
    DegreeMismatch,
    MissingTransition,
    NotCentered,
    NotHomogeneous,
    NotInvertible,
    ParseError,
    SignatureMismatch,
)
from .grading import (
    DegreeAssignment,
    DegreeVector,
    Ordering,
    SignTable,
    commutation_sign,
    compare_conventions,
    lex_order,
    parity,
    realize_sign_rule,
    scalar_product,
    validate_commutation_factor,
)
from .jets import Jet, jet_compose
from .series import FormalSignature, Series, naive_product_oracle, series_mul
from .morphism import (
    Morphism,
    SuperdomainSignature,
    check_inverse_pair,
    compose,
    from_coordinate_pullbacks,
    identity,
    invert,
    pullback,
)
from .atlas import Atlas, Chart, Report, Transition, check_atlas, check_cocycle, check_global_section, check_transition

__version__ = "0.1.0"

__all__ = [
    "DegreeMismatch",
    "MissingTransition",
    "NotCentered",
    "NotHomogeneous",
    "NotInvertible",
    "ParseError",
    "SignatureMismatch",
    "DegreeAssignment",
    "DegreeVector",
    "Ordering",
    "SignTable",
    "commutation_sign",
    "compare_conventions",
    "lex_order",
    "parity",
    "realize_sign_rule",
    "scalar_product",
    "validate_commutation_factor",
    "Jet",
    "jet_compose",
    "FormalSignature",
    "Series",
    "naive_product_oracle",
    "series_mul",
    "Morphism",
    "SuperdomainSignature",
    "check_inverse_pair",
    "compose",
    "from_coordinate_pullbacks",
    "identity",
    "invert",
    "pullback",
    "Atlas",
    "Chart",
    "Report",
    "Transition",
    "check_atlas",
    "check_cocycle",
    "check_global_section",
    "check_transition",
]
