"""Exact pre-Lie/Hopf computer algebra and numerical signatures for
multi-index rough paths."""

from .series import Series
from .prelie import (
    Character,
    Endo,
    GOIndex,
    PreLieInstance,
    bch_compose,
    character_inverse,
    coaction,
    convolve,
    prelie_identity_defect,
)
from .multiindex import (
    Flavor,
    MultiIndex,
    Nonlinearity,
    PolynomialFn,
    RSymbol,
    SinusoidFn,
    ExponentialFn,
    d_derivation,
    enumerate_populated,
    insert_prelie,
    r_prelie,
    rho_tilde_exp,
    t_instance,
    t_prelie,
    z_functional,
)
from .roughpath import (
    Driver,
    SignatureGrid,
    TranslationSpec,
    build_signature,
    chen_defect,
    extend_level,
    holder_report,
    named_driver,
    translate,
    translated_hierarchy_check,
)
from .trees import (
    Tree,
    branched_signature,
    dictionary_check,
    elementary_differential,
    enumerate_trees,
    expansion_check,
    fertility_class,
    graft,
    insertion,
    leaf,
    psi,
    tree_translate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
