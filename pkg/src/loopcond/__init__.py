"""Loop conditions, pseudo-loop conditions and their decision procedures on
finite algebras."""
from .core import (
    FiniteAlgebra,
    IdentitySystem,
    LoopCondition,
    Operation,
    Relation,
    condition_of,
    eval_term,
    is_trivial,
    parse_condition,
    parse_identities,
    relation_of,
    verify_witness,
)
from .errors import ArityError, BudgetExceeded, LoopCondError, ParseError
from .hom import find_hom, find_loop, implies_by_hom, make_clique
from .indicator import build_indicator, generate_closure, satisfies
from .terms import App, Term, Var, format_term, parse_term

__version__ = "0.1.0"
