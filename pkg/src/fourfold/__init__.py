"""Symbolic Seiberg-Witten calculus for constructed 4-manifolds and their families."""

__version__ = "0.1.0"

from .lattice import (  # noqa: E402
    CohClass,
    Generator,
    HomeoType,
    PairingTable,
    family_virtual_dimension,
    is_characteristic,
    pair,
    realizability_gate,
    shat_membership,
    square,
    virtual_dimension,
)
from .manifold import (  # noqa: E402
    ManifoldModel,
    SWFunction,
    connected_sum,
    fiber_sum,
    log_transform,
    make_elliptic,
    make_park_block,
    make_standard,
    stabilize,
    validate_model,
)
from .tree import mm_rewrite, normalize  # noqa: E402
from .blocks import ZConfig, build_Z  # noqa: E402
from .families import (  # noqa: E402
    FamilyElement,
    alpha,
    base_family,
    commutator_step,
    compose,
    conjugate,
    derived_invariant,
    evaluate,
    independence_certificate,
    suspend,
)

__all__ = [
    "CohClass", "Generator", "HomeoType", "PairingTable", "family_virtual_dimension",
    "is_characteristic", "pair", "realizability_gate", "shat_membership", "square",
    "virtual_dimension", "ManifoldModel", "SWFunction", "connected_sum", "fiber_sum",
    "log_transform", "make_elliptic", "make_park_block", "make_standard", "stabilize",
    "validate_model", "mm_rewrite", "normalize", "ZConfig", "build_Z", "FamilyElement",
    "alpha", "base_family", "commutator_step", "compose", "conjugate", "derived_invariant",
    "evaluate", "independence_certificate", "suspend",
]
