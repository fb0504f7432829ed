"""Workbench for monadic second-order logic and its fixpoint and
transitive-closure fragments on finite node-labeled sibling-ordered trees:
evaluation, translations, Ehrenfeucht-Fraisse games, compositional
reasoning, and Hilbert-style proof checking."""

from .errors import (EnumerationBudget, GameBudgetExceeded, IllegalMove,
                     LogicMismatch, NotStandard, NotSubstitutable, ParseError,
                     SchemaError, StructureError, TreelogicError,
                     UnboundVariable)
from .evaluate import Assignment, eval_lfp_kleene, eval_tc_path, evaluate
from .games import (GameConfig, GameState, Move, Player, apply_move,
                    initial_state, legal_moves, n_equivalent, optimal_move,
                    parse_move, status, winner, winning_condition)
from .structures import (Frame, ParamFrame, TreeStructure, check_forest_shape,
                         check_tree_axioms, check_tree_shape, parse_structure,
                         subforest_at, substructure)
from .syntax import (Formula, Logic, Vocabulary, check_positive,
                     exists_normal_form, forall_normal_form, free_variables,
                     nnf_gfp, parse_formula, quantifier_depth, render_formula,
                     substitute, tree_vocabulary)
from .composition import (FusionMap, disjoint_union, forest_compose,
                          forest_fusion_map, fuse, union_closure)
from .proofs import CheckResult, Proof, check_proof, load_proof
from .testkit import (GenConfig, canonical_tree_code, distinguishing_formula,
                      enumerate_formulas, frames_isomorphic, random_formula,
                      random_frame, random_near_tree, random_tree)
from .transforms import (axiom_instance, chi_finiteness, lfp_to_mso,
                         relativize, tautology_check, tc_to_lfp)

__version__ = "0.1.0"
