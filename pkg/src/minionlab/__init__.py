"""Finite multisorted operations, relation pairs, and the closures and
bounded constructibility checks that connect them."""

from .model import (
    Declaration,
    OperationTable,
    OperationValidation,
    ReflectionMap,
    SortedSet,
    build_operation,
    decode_tuple,
    encode_tuple,
    enumerate_declarations,
    enumerate_operations,
    identity_reflection,
    is_reasonable,
    power_carrier,
    reflection_exists,
    validate_operation,
)
from .kernels import BACKEND
from .ops import (
    MinionHom,
    MinorSpec,
    MinorTerm,
    MinorTermVar,
    OperationSet,
    all_minors,
    direct_power,
    find_minion_hom,
    is_minor_closed,
    mcf,
    minor,
    minor_term_eval,
    reflect_op,
    reflect_set,
    verify_minion_hom,
)
from .relpairs import (
    RelPairSet,
    RelationPair,
    TightClosure,
    all_diagonals,
    all_partitions,
    diagonal,
    elem_meet,
    elem_pr,
    elem_prod,
    elem_tau,
    elem_zeta,
    enumerate_pairs,
    is_relaxation,
    mcr_member,
    minv,
    minv_member,
    mpol,
    pair_from_rows,
    preserves,
    tight_closure,
)
from .reflift import (
    coreflect_pair,
    flatten_pair,
    flatten_partition,
    flatten_set,
    lift_pair,
    lift_set,
    reflect_pair,
)
from .checkers import (
    BOUND_EXHAUSTED,
    NEGATIVE,
    NO_REFLECTIONS,
    POSITIVE,
    CheckBounds,
    Witness,
    check_er,
    check_erp_via_hom,
    check_extension,
    check_power,
    check_reflection,
    check_rp_fin,
    check_rp_via_hom,
    enumerate_reflections,
    mc_constructs,
    verify_witness,
)

__version__ = "0.1.0"
