"""Tree straight-line programs: compression of ranked trees and formula balancing."""
from __future__ import annotations

from .bisection import BisectionTrace, depth_bound, tree_bisection
from .bushrink import PatternTree, bu_shrink, combined, default_k
from .circuits import (Circuit, Verdict, check_equivalence, evaluate, evaluate_formula,
                       format_circuit, formula_to_circuit, parse_circuit, tslp_to_circuit)
from .corpus import GenSpec, generate
from .dag import Dag, build_dag, dag_as_tslp, unfold
from .errors import (ArityError, GrammarError, MissingVariableError, NotCnfError, ParseError,
                     TreeSlpError, UnsupportedRankError, UnsupportedShapeError)
from .grammar import (Tslp, derivation_tree, format_tslp, modified_derivation_tree, parse_tslp,
                      tslp_depth, tslp_size, val)
from .monadic import to_monadic
from .semirings import Integers, MatrixModP, ModP
from .trees import Tree, fcns_decode, fcns_encode, parse_term, print_term

__all__ = [
    "Tree", "parse_term", "print_term", "fcns_encode", "fcns_decode",
    "Dag", "build_dag", "unfold", "dag_as_tslp",
    "Tslp", "val", "tslp_size", "tslp_depth", "derivation_tree", "modified_derivation_tree",
    "parse_tslp", "format_tslp", "to_monadic",
    "tree_bisection", "BisectionTrace", "depth_bound",
    "bu_shrink", "combined", "default_k", "PatternTree",
    "Circuit", "Verdict", "tslp_to_circuit", "formula_to_circuit", "evaluate",
    "evaluate_formula", "check_equivalence", "format_circuit", "parse_circuit",
    "Integers", "ModP", "MatrixModP", "GenSpec", "generate",
    "TreeSlpError", "ParseError", "ArityError", "GrammarError", "NotCnfError",
    "UnsupportedShapeError", "UnsupportedRankError", "MissingVariableError",
]
