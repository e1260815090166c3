"""Pseudo-random +/-1 matrices from binary linear codes and their convergence
to the Marchenko-Pastur law."""

__version__ = "0.1.0"

from .codes import (AtLeast, LinearCode, build_apn_code, build_rm1, dual_distance,  # noqa: F401
                    enumerate_codewords, psi_map, sample_signal_row)
from .gf import FieldSpec, ff_add, ff_mul, ff_pow, find_primitive  # noqa: F401
from .mplaw import MPParams, kappa, mp_cdf, mp_density, mp_interval, mp_stieltjes  # noqa: F401
from .metrics import ESD, interval_sup_distance, empirical_stieltjes  # noqa: F401
from .specmat import build_sample_matrix, gram, gram_spectrum  # noqa: F401
