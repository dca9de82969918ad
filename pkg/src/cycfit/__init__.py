"""cycfit: exact-arithmetic comparison of sampled cyclotomic ideals with
higher Fitting ideals of class groups over real abelian fields."""

__version__ = "0.1.0"

from .arith import FieldCtx, ModRing, dlog_p_part, make_field, root_of_unity
from .classgroup import FormClassGroup, ideal_class_of_prime, ingest_external, narrow_class_group
from .combined import build_combined, check_combined_identities, reciprocity_on_combined
from .fields import (
    AbelianFieldCtx,
    KolyvaginPrime,
    WellOrderedProduct,
    build_field,
    kolyvagin_primes,
    well_ordered_chains,
)
from .fitting import Presentation, fitting_ideal, fitting_of_p_group
from .groupring import (
    Character,
    FiniteAbelianGroup,
    GroupRing,
    GroupRingElement,
    IdealNF,
    chi_project,
    ideal_contains,
    ideal_normal_form,
)
from .ideals import CycIdealRun, sample_cyclotomic_ideal, stabilized
from .maps import annihilation_check, bracket_ell, phi_bar
from .units import (
    CircularUnitSymbol,
    DerivativeClass,
    DerivativeOperator,
    evaluate_kappa,
    evaluate_symbol,
    norm_relation_check,
)

__all__ = [
    "AbelianFieldCtx",
    "Character",
    "CircularUnitSymbol",
    "CycIdealRun",
    "DerivativeClass",
    "DerivativeOperator",
    "FieldCtx",
    "FiniteAbelianGroup",
    "FormClassGroup",
    "GroupRing",
    "GroupRingElement",
    "IdealNF",
    "KolyvaginPrime",
    "ModRing",
    "Presentation",
    "WellOrderedProduct",
    "annihilation_check",
    "bracket_ell",
    "build_combined",
    "build_field",
    "check_combined_identities",
    "chi_project",
    "dlog_p_part",
    "evaluate_kappa",
    "evaluate_symbol",
    "fitting_ideal",
    "fitting_of_p_group",
    "ideal_class_of_prime",
    "ideal_contains",
    "ideal_normal_form",
    "ingest_external",
    "kolyvagin_primes",
    "make_field",
    "narrow_class_group",
    "norm_relation_check",
    "phi_bar",
    "reciprocity_on_combined",
    "root_of_unity",
    "sample_cyclotomic_ideal",
    "stabilized",
    "well_ordered_chains",
]
