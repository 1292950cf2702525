'''Consistent query answering for primary keys.

Classification of self-join-free Boolean conjunctive queries, M-cycle elimination, rewriting
into symmetric stratified Datalog with min-aggregation, and certain-answer evaluation.
'''

from .attack_analysis import ComplexityClass, attack_graph, classify_complexity
from .codegen import compose_pipeline
from .config import EngineConfig, load_config
from .core import Database, Query, load_database, load_query, parse_database, parse_query
from .errors import CQAError
from .pipeline import certain_answer_direct, certain_answer_oracle, reduce_once

__version__ = '0.1.0'

__all__ = [
    'CQAError', 'ComplexityClass', 'Database', 'EngineConfig', 'Query', 'attack_graph',
    'certain_answer_direct', 'certain_answer_oracle', 'classify_complexity', 'compose_pipeline',
    'load_config', 'load_database', 'load_query', 'parse_database', 'parse_query',
    'reduce_once',
]
