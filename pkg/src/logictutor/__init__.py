"""logictutor: a data-driven propositional proof tutor.

Students derive a conclusion from given statements by applying inference
and replacement rules; historical solution corpora are compiled into
interaction networks whose MDP state values drive Next-Step and Waypoint
pointing hints.
"""

from .formula import Formula, atoms, entails, parse, render
from .rules import CATALOG, applicable_rules, enumerate_conclusions, validate_derivation

__all__ = [
    "Formula",
    "parse",
    "render",
    "atoms",
    "entails",
    "CATALOG",
    "enumerate_conclusions",
    "validate_derivation",
    "applicable_rules",
]

__version__ = "0.1.0"
