"""Finite Euclidean and non-Euclidean graphs over GF(q): construction, spectra, combinatorics."""

from .ffield import ExtCtx, FieldCtx, ext_field, field_for_order, make_field
from .graphs import (
    Graph,
    build_alon_graph,
    build_code_graph,
    build_euclidean,
    build_halfplane,
    build_orthogonal,
    halfplane_ext,
    nonisotropic_points,
)
from .qforms import QuadraticForm, eval_form, make_form, sphere_size
from .spectral import NDLCertificate, Spectrum, certify, spectrum_charsum, spectrum_dense

__version__ = "0.1.0"

__all__ = [
    "ExtCtx",
    "FieldCtx",
    "Graph",
    "NDLCertificate",
    "QuadraticForm",
    "Spectrum",
    "build_alon_graph",
    "build_code_graph",
    "build_euclidean",
    "build_halfplane",
    "build_orthogonal",
    "certify",
    "eval_form",
    "ext_field",
    "field_for_order",
    "halfplane_ext",
    "make_field",
    "make_form",
    "nonisotropic_points",
    "spectrum_charsum",
    "spectrum_dense",
    "sphere_size",
]
