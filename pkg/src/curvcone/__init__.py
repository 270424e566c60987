"""Conformal metrics with curvature eigenvalues in a prescribed cone.

Chart-based curvature engine, cone families, the exponential ansatz
``u = e^{Nv}`` and verification pipelines for conformal metrics of
positive Einstein tensor and of negative sectional curvature.
"""

from .ansatz import (
    AnsatzConfig,
    CaseTag,
    LowerOrderTerm,
    VerificationReport,
    build_V,
    build_W,
    classify_case,
    construct_negative_sectional,
    construct_positive_einstein,
    exponential_ansatz,
    find_min_N,
    verify_morse,
)
from .cones import ConeSpec
from .geometry import ChartMetric, FiniteDifferenceProvider, TaylorProvider, conformal_metric, local_geometry
from .lintensor import generalized_eigenvalues, kulkarni_nomizu, sigma_k

__version__ = "0.1.0"
