"""Exact tools for spreads, quasifields and their translation structures.

Everything is integer arithmetic over small finite fields: spread sets and
their coordinate quasifields, block-matrix spread constructions, normal
element scans, point-set closure in a projective plane, and the affine
design attached to a spread.  The heavy scans run through a compiled
kernel backend with a pure Python fallback (see spreadlab.backend).
"""

__version__ = "0.1.0"

from .errors import BudgetExceededError, DomainError, SpreadLabError
from .gf import GF, gf_of_order
from .projgeom import Subspace, standard_element
from .spreadsets import (
    Quasifield,
    SpreadSet,
    check_quasifield_axioms,
    dickson_nearfield,
    field_spread_set,
    is_dickson_pair,
    is_nearfield_set,
    is_semifield_set,
    kernel_of,
    quasifield_from_spread_set,
    search_closed_spread_sets,
    spread_set_from_quasifield,
    validate_spread_set,
)
from .spreads import (
    Spread,
    construct_S_r,
    construct_T_3,
    construct_U_r,
    is_desarguesian,
    is_normal_element,
    max_normal_general_position,
    normal_elements,
    normal_indices,
    regulus_closure_at,
    spread_report,
    validate_spread,
)
from .fieldreduction import desarguesian_spread, regulus, subplane_V
from .closure import (
    closure,
    line_through,
    meet_lines,
    restricted_closure,
    subplane_trial,
    verify_lemma_5_4,
)
from .sperner import (
    SpernerSpace,
    build_sperner,
    collinear,
    export_design_csv,
    is_normal_line,
    linear_manifold,
    normal_line_scan,
    pseudo_plane,
    validate_design,
)
from .scenarios import list_scenarios, run_scenario
