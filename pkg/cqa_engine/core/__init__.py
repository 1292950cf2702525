'''Domain model: constants, atoms, queries, databases, repairs and query evaluation.'''

from .database import (Database, blocks, database_to_edb, edb_to_database, enumerate_repairs,
                       is_repair, repair_count, sort_blocks)
from .evaluation import eval_bcq, image, iter_embeddings, satisfies
from .parser import (load_database, load_query, parse_database, parse_query, print_database,
                     print_query, render_fact)
from .schema import Atom, BlockId, Fact, Mode, Query, RelationSchema, block_label
from .terms import Constant, ConstantKind, ConstantOrder, Term, Valuation, Variable, is_variable

__all__ = [
    'Atom', 'BlockId', 'Constant', 'ConstantKind', 'ConstantOrder', 'Database', 'Fact', 'Mode',
    'Query', 'RelationSchema', 'Term', 'Valuation', 'Variable', 'block_label', 'blocks',
    'database_to_edb', 'edb_to_database', 'enumerate_repairs', 'eval_bcq', 'image',
    'is_repair', 'is_variable', 'iter_embeddings', 'load_database', 'load_query',
    'parse_database', 'parse_query', 'print_database', 'print_query', 'render_fact',
    'repair_count', 'satisfies', 'sort_blocks',
]
