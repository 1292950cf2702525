'''Stratified Datalog with negation, vector built-ins and min-aggregation.'''

from .evaluator import Relation, Row, Store, evaluate, goal_holds
from .ir import BodyItem, Comparison, Literal, Program, Rule
from .text import parse_program, print_program
from .validate import (ValidationReport, check_program, make_program, stratify,
                       symmetric_version, validate)

__all__ = [
    'BodyItem', 'Comparison', 'Literal', 'Program', 'Relation', 'Row', 'Rule', 'Store',
    'ValidationReport', 'check_program', 'evaluate', 'goal_holds', 'make_program',
    'parse_program', 'print_program', 'stratify', 'symmetric_version', 'validate',
]
