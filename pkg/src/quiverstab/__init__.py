"""Exact stability computations for quiver representations over small prime fields."""

from __future__ import annotations

from .document import Document, load_document, parse_document
from .errors import (
    CapExceeded,
    ClassMismatch,
    DegreeError,
    InvariantViolation,
    NotSemistableError,
    ParseError,
    QuiverStabError,
    RelationError,
)
from .families import (
    FamilyOverP1,
    check_family,
    det_degrees,
    ell_dot_C_charge,
    ell_dot_C_determinant,
    fiber_at,
    make_family,
    positivity_report,
)
from .knum import EulerMatrix, TorTable, euler_form_acyclic, euler_form_from_tor, verify_perfect_pairing
from .quiver import Quiver, QuiverPresentation, parse_presentation, render_presentation
from .representation import (
    Representation,
    Submodule,
    all_submodules,
    are_isomorphic,
    hom_space,
    make_representation,
    projective_module,
    vertex_simple,
)
from .stability import (
    StabilityParams,
    central_charge,
    classify,
    hn_filtration,
    is_sigma_semistable,
    is_sigma_stable,
    is_theta_semistable,
    is_theta_stable,
    jh_factors,
    make_params,
    phase_compare,
    s_equivalent,
)
from .walls import actual_walls, census, chambers, potential_walls

__version__ = "0.1.0"
