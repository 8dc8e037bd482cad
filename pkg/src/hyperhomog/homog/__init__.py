"""The 12-dimensional homogeneous examples with isotropy so(1,2)."""
from .geometry import (
    Geometry,
    KNResult,
    NomizuResult,
    TorsionReport,
    d_omega,
    intrinsic_torsion,
    invariance_residual,
    isotropy_action,
    kn_consistency,
    kn_fit,
    nijenhuis,
    nomizu,
    tensor_coords,
    tensor_spec,
)
from .jacobi import (
    JacobiResidual,
    JacobiSystem,
    Poly,
    h_jacobi_check,
    jacobi_bruteforce,
    jacobi_residual,
    jacobi_system,
)
from .model import (
    BETA_SIZE,
    BetaTensor,
    ModelError,
    ReductiveModel,
    assemble_model,
    build_beta,
    cross_matrix,
    load_beta,
    mink_cross,
    random_beta,
)

__all__ = [name for name in dir() if not name.startswith("_")]
