"""Hyperplanes in finite abelian groups, their splittings, and rho-invariant arithmetic."""

from __future__ import annotations

__version__ = "0.1.0"

from .core import (
    AffineSubgroup,
    Character,
    Group,
    HomMatrix,
    affine_closure,
    apply_hom,
    char_eval,
    enumerate_elements,
    is_isomorphism,
    make_group,
)
from .duality import (
    BlockFormReport,
    analyze_iso,
    annihilator,
    dual_hom,
    preserves_zero_locus,
    transport_hyperplane,
)
from .errors import HypersplitError
from .hyperplanes import (
    AffineHyperplane,
    NearlyCoordinateData,
    classify_order2,
    classify_z0_hyperplane,
    coordinate_hyperplane,
    enumerate_z0_hyperplanes,
    hyperplane_from_members,
    is_contained_in_zero_locus,
    is_maximal_in_zero_locus,
    members,
    nearly_coordinate,
    vile_hyperplane,
    zero_locus,
)
from .signatures import (
    LensSpace,
    RhoTable,
    SignatureFamily,
    cancellation_analyze,
    certify_signature_simple,
    lens_bounded_signature,
    model_signature,
    product_signature,
    rho,
    rho_parity,
    signature_zero_locus,
)
from .splittings import (
    RecoveryReport,
    Splitting,
    find_splittings_with_union,
    is_splitting,
    recover,
    union,
)

__all__ = [name for name in dir() if not name.startswith("_")]
