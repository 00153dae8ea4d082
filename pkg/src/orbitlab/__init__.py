"""Backward-orbit dynamics of univalent holomorphic self-maps.

Kobayashi geometry on the disc, ball, polydisc, Siegel half-space and slit
plane; orbits, step sequences and type classification; the bounded-step
partition of the stable subset; pre-model verification.
"""

from .catalog import CatalogEntry, Truth, catalog_get, catalog_list, catalog_names
from .dsl import MapDef, eval_jet, format_map, parse_map, parse_point
from .dynamics import (
    DWReport,
    StepEstimate,
    TypeReport,
    backward_step,
    classify_type,
    denjoy_wolff,
    dilation_at,
    divergence_rate,
    forward_step,
)
from .errors import (
    DomainError,
    EvaluationError,
    InconclusiveError,
    InversionError,
    LeftDomain,
    MapSyntaxError,
    NewtonDiverged,
    OrbitlabError,
    SingularJacobian,
)
from .geometry import (
    INFINITY,
    Domain,
    ball_automorphism,
    cayley_transform,
    contains,
    kobayashi_distance,
    kobayashi_metric,
    koranyi_membership,
    sequence_flags,
    use_convention,
)
from .holomap import OrbitRecord, backward_orbit, forward_orbit, invert_point
from .premodel import (
    HyperbolicNormalForm,
    PreModel,
    normal_form_tau,
    sigma_closed_form,
    siegel_example_premodel,
    verify_premodel,
)
from .stable_set import (
    BoundednessVerdict,
    Partition,
    class_rate,
    equivalent,
    in_stable_set,
    limit_distance,
    partition,
    tangent_bounded,
)

__version__ = "0.1.0"
