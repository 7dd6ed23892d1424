"""Orthonormal families of self-adjoint unitaries in two tracial models.

Model A: exact rational step functions on [0,1) with the integral trace.
Model B: Hermitian matrix bundles with the normalized matrix trace.
Both run the same pipeline: projection extraction -> norming unitary ->
greedy pursuit -> stage driver, with machine-checkable certificates.
"""

from .stepfn import (
    DomainError,
    OrthoFamily,
    OrthonormalityError,
    StepFn,
    StructuralError,
    canonicalize,
    common_refinement,
    inner,
    lin_comb,
    norm2_sq,
    norm_inf,
    pointwise_mul,
    project_residual,
    trace,
)
from .lyapunov import extract_projection, norming_unitary
from .pursuit import CellCeilingError, PursuitTrace, iteration_bound, pursue
from .basis import (
    BasisState,
    dense_element,
    pair_index,
    run_stages,
    trace_vector_certificate,
    verify_basis,
)
from .matbundle import (
    MatStepFn,
    TolSet,
    ToleranceError,
    nc_extract_projection,
    nc_inner,
    nc_norm_inf,
    nc_norming_unitary,
    nc_pursue,
    nc_trace,
)
from .estimators import BasisTransformer, UnitaryPursuit

__version__ = "0.1.0"
