"""Monodromy of connection systems on Riemann surface quivers and multiplicative preprojective relations."""

from .additive import (
    ConnectionSystemRep,
    LiftingVerdict,
    SummandDescriptor,
    check_deformed_preprojective,
    check_eigenvalues_in_T,
    check_residue_relations,
    lifting_criterion,
)
from .dynkin import DoubleQuiverRep, dynkin_quiver, exp_functor_on_rep, log_functor_on_rep, verify_dynkin_corollary
from .errors import *  # noqa: F401,F403
from .fuchsian import (
    FuchsianSystem,
    IntegratorConfig,
    Loop,
    compare_with_algebraic,
    hilbert21_demo,
    monodromy_along,
    total_monodromy_check,
)
from .matfun import exp_2pii, hom_dimension, phi_matrix, phi_times, psi_times
from .multiplicative import (
    MonodromyRep,
    check_arrow_relations,
    check_eigenvalues_in_S,
    check_mpa_vertex_relation,
    surface_group_relation_check,
)
from .quiver_model import (
    Arrow,
    Component,
    EigenvalueSet,
    MarkedPoint,
    RiemannSurfaceQuiver,
    WeightData,
    component_quiver,
    eigenvalue_set_S,
    p1_quiver,
)
from .reports import Report
from .transform import CyclicRep, cyclic_exp, cyclic_log, forward_transform, inverse_transform

__version__ = "0.1.0"
