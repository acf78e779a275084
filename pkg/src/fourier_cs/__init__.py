"""Deterministic partial Fourier sensing matrices from finite-field logarithms."""

from .charsums import SweepCertificate, certify_bound, certify_quadratic, katz_sum
from .dlog import DlogTable, build_table, log, log_many
from .field import (FieldElement, FieldError, FieldParams, find_primitive_root,
                    is_primitive, make_field)
from .indexsets import IndexSet, amub_partition, build_amub, build_full, build_quotient
from .matrix import (SensingMatrix, certify_amub, coherence_bruteforce, coherence_fft,
                     welch_bound)
from .recovery import (ExperimentConfig, SolverParams, basis_pursuit, gen_signal,
                       measure, omp, run_success_sweep)
from .spectral import EigConfig, gram, hermitian_eigs, run_eig_sweep

__version__ = "0.1.0"

__all__ = [
    "DlogTable", "EigConfig", "ExperimentConfig", "FieldElement", "FieldError",
    "FieldParams", "IndexSet", "SensingMatrix", "SolverParams", "SweepCertificate",
    "amub_partition", "basis_pursuit", "build_amub", "build_full", "build_quotient", "log_many",
    "build_table", "certify_amub", "certify_bound", "certify_quadratic",
    "coherence_bruteforce", "coherence_fft", "find_primitive_root", "gen_signal", "gram",
    "hermitian_eigs", "is_primitive", "katz_sum", "log", "make_field", "measure", "omp",
    "run_eig_sweep", "run_success_sweep", "welch_bound",
]
