"""Clean extension criteria for rank-one twisted local systems on monomial atlases.

The builtin model is the four-chart atlas of the two-dimensional Schubert
variety in the affine flag variety of SL2; any other atlas can be supplied
as a YAML model file.
"""
from .atlas import (AtlasModel, Chart, FiberSpec, TotalTransition, check_linebundle,
                    derive_logform_cocycle, transition, verify_cocycles)
from .builtin import builtin_sl2
from .cleanness import (boundary_forms, chart_exponents, criterion, evaluate_clean,
                        specialize)
from .lattice import (is_clean_oracle, is_simple, oracle_grid, oracle_vs_criterion,
                      submodule_support)
from .loopgroup import LoopMatrix, coset_equal, in_iwahori, in_iwahori_unipotent, verify_fixtures
from .modelfile import dump_model, load_model, loads_model
from .symcore import (ExponentVector, LinearForm, MonomialMap, ParamSpace, compose,
                      evaluate, invert, is_integral, normalize_form, parse_form,
                      pullback_exponents)

__version__ = "0.1.0"
