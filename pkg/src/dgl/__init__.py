"""Workbench for dynamic Gödel-Löb logic over scattered spaces.

Formulas, finite poset models, types and states, simulation formulas,
quasimodels with their lasso unwinding, and a bounded satisfiability
search that returns certificate quasimodels.
"""
from .errors import (DGLError, FormulaSyntaxError, LimitError, ModelError,
                     QuasimodelError, StateError)
from .formula import (And, Atom, Box, Dia, Evt, Formula, Hence, Iff, Implies, Neg, Next, Or,
                      closure_of, closure_pm, neg_norm, parse, to_string)
from .model import (PosetModel, TruthSet, axiom_instance, evaluate, is_valid, random_formula,
                    random_model, validate_model)
from .quasimodel import (Lasso, Quasimodel, down_state, extend_to_lasso, lasso_coherence, lower_path,
                         model_to_quasimodel, neighbourhood_member, random_quasimodel,
                         scattered_witness, shift, validate_quasimodel)
from .search import SearchBounds, SearchOutcome, efficient_paths, rho, sat_search
from .simformula import check_characterization, sim_formula
from .states import (SigmaType, State, bounded_future, enumerate_types, in_universal, norm,
                     sensible_pair, shrink, simulates, state_from_document, state_of_point,
                     step_exists, substates, successor_candidates, unfold)

eval = evaluate

__version__ = "0.1.0"
