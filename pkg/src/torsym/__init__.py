"""Global symbol calculus on the torus and on SU(2)."""

from .dsl import SymbolExpr, evaluate, parse
from .errors import *  # noqa: F401,F403
from .expansion import (CutoffFunction, ExpansionFit, eta_moment, extract_canonical_trace,
                        extract_residue, fit_expansion, weighted_trace_su2, weighted_trace_torus)
from .extension import extend_gradient, extend_homogeneous_term, extend_value
from .quantize import (TrigPolynomial, apply, apply_direct, kernel_slice, trace_direct,
                       translate)
from .su2 import (Su2Symbol, clebsch_gordan, difference_fundamental, homogeneous_su2_symbol,
                  irrep, principal_symbol_limit, seminorm_su2, trace_su2)
from .symbols import (ClassicalToroidalSymbol, HomogeneousTerm, LatticeSymbol, bracket_symbol,
                      classical_eval, difference, homogeneous_symbol, seminorm_estimate,
                      x_derivative)
from .traces import (SphereQuadrature, annulus_limit, canonical_trace_finite_part, residue,
                     residue_density)

__version__ = "0.1.0"
