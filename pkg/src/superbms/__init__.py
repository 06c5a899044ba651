"""Exact computations for the N=1 BMS superalgebra: brackets, PBW normal forms,
Verma modules with their contravariant form, and the free-field realization."""

from .algebra import C1, C2, K, AlgebraElement, Generator, HalfInt, L, M, Q, a, b, bar, bracket, c
from .exactnum import Poly, PolyMatrix, det_fraction_free
from .freefield import (
    FfrParams,
    FockVector,
    HcModuleSpec,
    bms_whittaker_simple,
    commutator_residual,
    ffr_act,
    fock_hw_data,
    fock_simple,
    fock_whittaker_simple,
    hc_act,
    hc_whittaker_simple,
    whittaker_action_table,
)
from .pbw import IndexTriple, UEAElement, compare, normal_form, partition_count, star_dual, weight_basis
from .verma import (
    GramData,
    VermaVector,
    WeightParams,
    act,
    contravariant_form,
    gram_data,
    singular_vectors,
    vacuum_simple,
    verma_simple,
)

__version__ = "0.1.0"
