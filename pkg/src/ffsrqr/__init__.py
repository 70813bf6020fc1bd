"""Randomized rank-revealing factorizations and approximate SVD, with
Tucker tensor compression and nuclear-norm solvers built on top."""

from .backend import BACKEND
from .errors import (
    CertificationError,
    DimensionError,
    NumericalError,
    SingularTrailingBlockError,
)
from .generators import (
    gen_mc_instance,
    gen_rpca_instance,
    gen_sparse_tensor,
    gen_type1,
    kahan,
)
from .nuclear import IalmParams, IalmState, ialm_mc, ialm_rpca, nmae, soft_shrink
from .qr import PartialFactorization, WYFactor, partial_qrcp
from .sketch import SketchParams, rqrcp, trqrcp
from .srqr import SrqrCertificate, SrqrResult, estimate_g2, srqr
from .svd import (
    ApproxSvd,
    BoundReport,
    check_theorem_bounds,
    flip_flop_flop_formula,
    flip_flop_srqr,
    rsisvd,
    rsisvd_flop_formula,
    truncated_svd_oracle,
)
from .tensor import (
    TuckerDecomp,
    fold,
    hosvd,
    nmode_product,
    st_hosvd,
    tucker_error,
    unfold,
)

__version__ = "1.0.0"

__all__ = [
    "ApproxSvd", "BACKEND", "BoundReport", "CertificationError",
    "DimensionError", "IalmParams", "IalmState", "NumericalError",
    "PartialFactorization", "SingularTrailingBlockError", "SketchParams",
    "SrqrCertificate", "SrqrResult", "TuckerDecomp", "WYFactor",
    "check_theorem_bounds", "estimate_g2", "flip_flop_flop_formula",
    "flip_flop_srqr", "fold", "gen_mc_instance", "gen_rpca_instance",
    "gen_sparse_tensor", "gen_type1", "hosvd", "ialm_mc", "ialm_rpca",
    "kahan", "nmae", "nmode_product", "partial_qrcp", "rqrcp", "rsisvd",
    "rsisvd_flop_formula", "soft_shrink", "srqr", "st_hosvd", "trqrcp",
    "truncated_svd_oracle", "tucker_error", "unfold",
]
