"""Residual checks, the synthetic oracle, the exact case engine and classification."""

from .cases import case_deduction
from .identities import eq24_lhs, proof_step_residual
from .synthetic import (calibrate_and_check_31_to_35, calibrate_and_check_37, run_oracle,
                        synthetic_point)
from .theorem import classify, neighborhood_scan, proof_report

__all__ = ["calibrate_and_check_31_to_35", "calibrate_and_check_37", "case_deduction", "classify",
           "eq24_lhs", "neighborhood_scan", "proof_report", "proof_step_residual", "run_oracle",
           "synthetic_point"]
