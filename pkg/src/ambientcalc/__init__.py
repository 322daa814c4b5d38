"""Exact jet-level toolkit for ambient metrics, tractor calculus, and
pointwise holonomy criteria of generic 2-plane fields."""

from .jets import Jet, JetError, jet_poly
from .tensors import (MetricJet, TensorJet, christoffel, conformal_rescale,
                      cotton, flat_metric, metric_from_rows, ricci, riemann,
                      scalar_curvature, schouten, schouten_trace,
                      trace_free_part, weyl)

__all__ = [
    "Jet", "JetError", "jet_poly",
    "MetricJet", "TensorJet", "christoffel", "conformal_rescale", "cotton",
    "flat_metric", "metric_from_rows", "ricci", "riemann", "scalar_curvature",
    "schouten", "schouten_trace", "trace_free_part", "weyl",
]
