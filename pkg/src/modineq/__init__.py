"""Operator inequalities from quasi-entropy monotonicity under partial traces."""
from .builders import (
    BuiltOperator,
    build_general,
    build_general_rev,
    cond_info_bound,
    cs_operator,
    lieb_ruskai_cs,
    mpt_operator,
    non_hermitian_probe,
    ssa_operator,
    ssa_operator_kim,
    ssa_rev_operator,
    subadditivity_operator,
    wyd_operator,
    xhalf_operator,
    xpq_operator_probe,
    xpq_value,
)
from .errors import ModineqError
from .gfuncs import GFunction, KFunction, catalog, g_from_k, parse_g, symmetrize, tilde, wyd
from .spectral import (
    Eigensystem,
    apply_g_modular,
    matrix_function,
    modular_superoperator,
    quasi_entropy,
)
from .tensor import HermitianMatrix, SpaceDims, embed, herm_defect, partial_trace

__version__ = "0.1.0"
