#!/usr/bin/env python3
'''Exception hierarchy for the CQA engine.'''

from typing import Optional


class CQAError(Exception):
    '''Base class for every error raised by the engine.'''


class ConfigError(CQAError):
    '''Configuration file or environment value could not be used.'''


class QuerySyntaxError(CQAError):
    '''Malformed .cqa, .facts or .dl text.'''

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class SchemaError(CQAError):
    '''Relation signatures are inconsistent (self-join, bad key length, arity).'''


class DatabaseError(CQAError):
    '''A fact does not fit the schema or violates a mode-c key.'''


class OracleInfeasibleError(CQAError):
    '''A brute-force oracle would exceed its configured cap.'''


class PreconditionError(CQAError):
    '''An operation was called outside its documented preconditions.'''


class SaturationError(CQAError):
    '''Purification could not introduce the requested fresh relation.'''


class InvalidInstanceError(CQAError):
    '''A LONGCYCLE instance violates the k-partite instance invariants.'''


class DatalogError(CQAError):
    '''Base class for Datalog program problems.'''


class DatalogSyntaxError(QuerySyntaxError, DatalogError):
    '''Malformed .dl text.'''


class StratificationError(DatalogError):
    '''The program has negation or aggregation through recursion.'''


class RangeRestrictionError(DatalogError):
    '''A rule uses a variable that no positive body literal binds.'''


class ClassificationRefusedError(CQAError):
    '''The query is coNP-complete and cannot be compiled.'''

    def __init__(self, message: str, complexity: Optional[object] = None):
        self.complexity = complexity
        super().__init__(message)


class ReductionError(CQAError):
    '''An M-cycle reduction left a strong cycle or kept every mode-i atom.'''
