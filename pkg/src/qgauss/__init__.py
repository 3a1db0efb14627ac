"""Exact computations for q-Gaussian processes and their classical versions."""

from .bell import FeasibilityVerdict, Verdict, bell_check, bm_cond_variance, e1_region, region_scan, variance_min
from .fock import TensorState, annihilate, create, field_apply, fock_inner, fock_inner_naive, inversions
from .hilbert import CovarianceSpec, GramSpace, Vec, covariance_space, inner, project
from .moments import (
    ClassicalCoeffs,
    SwitchKind,
    TripletCoeffs,
    apply,
    classical_coeffs,
    hermite_of_field,
    switch_bruteforce,
    switch_closed_form,
    triplet_coeffs,
    vacuum_expectation,
    wick,
    wick_conditional,
)
from .qcore import Polynomial, hermite, q_factorial, q_int
from .quadrature import QuadratureRule, check_orthogonality, gauss_rule

__version__ = "0.1.0"
