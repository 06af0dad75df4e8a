"""Exact rational quadratic forms and flat-manifold checks for commensurability witnesses."""

from .arith import INF, factor, is_local_square, legendre, square_class
from .bieberbach import (
    AffineIsometry,
    CrystalPresentation,
    GroupClosure,
    closure,
    ghw_search,
    im_kim,
    is_diagonal_holonomy,
    is_ghw,
    is_orientable,
    is_torsion_free,
    preserves_form,
    product_with_circle,
    topology_flags,
)
from .equivalence import (
    ProjectiveVerdict,
    commensurable,
    projectively_equivalent,
    rationally_equivalent,
    scaled_profile,
)
from .forms import (
    DiagonalForm,
    Signature,
    SymmetricForm,
    diagonalize,
    direct_sum,
    discriminant,
    lorentz_j,
    parse_form,
    scale,
    signature,
)
from .local import InvariantProfile, TargetProfile, hasse_witt, hilbert, profile, relevant_places
from .pipeline import cusp_witness, verify_certificate
from .realization import definite_complement, realize, serre_feasible

__version__ = "0.1.0"
