"""Dual-branch compressed sampling with extraction, reconstruction, and analysis."""

__version__ = "0.1.0"

from .analysis import (PowerCurve, RipReport, erf_row, measurement_power, psnr,
                       rip_constant, ssim, support_span)
from .channel import add_awgn, quantize, quantizer_params
from .extraction import (ExtractedSystem, LinearityReport, extract, load_system,
                         merge_mask, save_system, verify_linearity)
from .filternet import (FilterNet, apply_kernel, filter_adjoint, filter_forward,
                        init_filter, load_weights, merge_kernels, save_weights)
from .formats import FileFormatError
from .imageio import (center_crop, load_corpus, load_image, save_image,
                      save_image_with_sidecar, to_gray, to_u8)
from .operators import (AffineOperator, LinearOperator, compose, from_matrix,
                        from_permutation, identity, power_iteration)
from .pgd import PgdConfig, SolverDiverged, SolveTrace, pgd_solve, prox_dct, soft_threshold
from .sampling import (CosoConfig, Measurement, VARIANTS, back_project, build_coso,
                       combine_init, config_from_dict, config_to_dict, sample_image,
                       split_measurement, with_variant)
from .transforms import GaussianMatrix, ZigZagOrder, dct2, gaussian_matrix, idct2, zigzag_order

__all__ = [
    "AffineOperator", "CosoConfig", "ExtractedSystem", "FileFormatError", "FilterNet",
    "GaussianMatrix", "LinearOperator", "LinearityReport", "Measurement", "PgdConfig",
    "PowerCurve", "RipReport", "SolveTrace", "SolverDiverged", "VARIANTS", "ZigZagOrder",
    "add_awgn", "apply_kernel", "back_project", "build_coso", "center_crop", "combine_init",
    "compose", "config_from_dict", "config_to_dict", "dct2", "erf_row", "extract",
    "filter_adjoint", "filter_forward", "from_matrix", "from_permutation", "gaussian_matrix",
    "idct2", "identity", "init_filter", "load_corpus", "load_image", "load_system",
    "load_weights", "measurement_power",
    "merge_kernels", "merge_mask", "pgd_solve", "power_iteration", "prox_dct", "psnr", "quantize",
    "quantizer_params", "rip_constant", "sample_image", "save_image", "save_image_with_sidecar",
    "save_system", "save_weights", "soft_threshold", "split_measurement", "ssim", "support_span",
    "to_gray", "to_u8", "verify_linearity", "with_variant", "zigzag_order",
]
