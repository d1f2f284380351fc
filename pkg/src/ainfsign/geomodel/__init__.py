"""Exact de Rham model on interval-circle products: forms with rational
polynomial coefficients, integration along fibers of coordinate
projections, smooth-map pullback, correspondences and their composition,
plus randomized exact verifiers and mock moduli correspondences."""

from .core import (
    CIRCLE,
    INTERVAL,
    POINT,
    CorrespondenceModel,
    CubeTorusSpace,
    Form,
    Poly,
    ProjectionMap,
    SmoothMapModel,
    apply_correspondence,
    boundary_correspondence_apply,
    boundary_faces,
    boundary_pushforward,
    bundle_orientation_sign,
    compose_projection,
    compose_smooth,
    constant_map,
    d,
    exterior_derivative,
    fiber_product,
    identity_map,
    integrate,
    projection,
    pullback,
    pullback_bundle,
    pushforward,
    smooth_map,
    space,
    wedge,
    wedge_all,
)
from .checks import (
    ALL_CHECKS,
    CheckResult,
    MockModuli,
    PushPullReport,
    check_pushpull_identities,
    derived_node_parity,
    glue_mocks,
    mock_operation,
    random_form,
    random_mock_instance,
    run_all_checks,
    verify_base_change,
    verify_composition,
    verify_corr_stokes,
    verify_defining_property,
    verify_functoriality,
    verify_projection_formula,
    verify_pushpull,
    verify_stokes,
)
