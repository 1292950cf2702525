#!/usr/bin/env python3
'''Readers and writers for the .cqa query format and the .facts database format.

    q :- R(x | y), S(y | z), Tc@c(z | w).
    R("a1" | "b1").
    R(a2 | b2).          # bare identifiers in .facts are text constants
'''

from typing import Dict, List, Mapping, Optional, Tuple

from ..errors import DatabaseError, QuerySyntaxError, SchemaError
from .database import Database
from .lexer import Token, TokenStream, lex
from .schema import Atom, Fact, Mode, Query, RelationSchema
from .terms import Constant, Term, Variable


def _parse_constant(ts: TokenStream, bare_text: bool) -> Constant:
    tok = ts.peek()
    if tok.kind == 'int':
        ts.next()
        return Constant.number(tok.value)  # type: ignore[arg-type]
    if tok.kind == 'string':
        ts.next()
        return Constant.text(tok.value)  # type: ignore[arg-type]
    if tok.kind == 'ident' and bare_text:
        ts.next()
        return Constant.text(tok.text)
    if ts.accept('('):
        items = [_parse_constant(ts, bare_text)]
        while ts.accept(','):
            items.append(_parse_constant(ts, bare_text))
        ts.expect(')')
        return Constant.tuple_of(items)
    ts.fail(f"expected a constant, found {tok.text or 'end of input'!r}", tok)
    raise AssertionError("unreachable")


def parse_term(ts: TokenStream) -> Term:
    '''Bare identifiers are variables; everything else is a constant.'''
    tok = ts.peek()
    if tok.kind == 'ident':
        ts.next()
        return Variable(tok.text)
    return _parse_constant(ts, bare_text=False)


def _parse_term_list(ts: TokenStream, parse_one) -> List:
    if ts.at(')') or ts.at('|'):
        return []
    items = [parse_one()]
    while ts.accept(','):
        items.append(parse_one())
    return items


def _parse_split_args(ts: TokenStream, parse_one) -> Tuple[List, List]:
    ts.expect('(')
    key = _parse_term_list(ts, parse_one)
    values: List = []
    if ts.accept('|'):
        values = _parse_term_list(ts, parse_one)
    ts.expect(')')
    return key, values


def _parse_atom(ts: TokenStream) -> Tuple[Atom, Token]:
    name_tok = ts.expect_kind('ident', 'a relation name')
    mode = Mode.I
    if ts.accept('@'):
        mode_tok = ts.expect_kind('ident', "mode 'c' or 'i'")
        if mode_tok.text not in ('c', 'i'):
            ts.fail(f"unknown mode @{mode_tok.text}", mode_tok)
        mode = Mode(mode_tok.text)
    key, values = _parse_split_args(ts, lambda: parse_term(ts))
    try:
        schema = RelationSchema(name_tok.text, len(key) + len(values), len(key), mode)
        return Atom(schema, tuple(key), tuple(values)), name_tok
    except SchemaError as e:
        raise SchemaError(f"{e} (line {name_tok.line}, column {name_tok.column})")


def parse_query(text: str) -> Query:
    '''Parse `name :- Atom, ..., Atom.`; rejects self-joins.'''
    ts = TokenStream(lex(text))
    head = ts.expect_kind('ident', 'a query name')
    ts.expect(':-')
    atoms: List[Atom] = []
    seen: Dict[str, Token] = {}
    if not ts.at('.'):
        while True:
            atom, tok = _parse_atom(ts)
            if atom.name in seen:
                raise SchemaError(f"self-join: relation {atom.name} occurs twice "
                                  f"(line {tok.line}, column {tok.column})")
            seen[atom.name] = tok
            atoms.append(atom)
            if not ts.accept(','):
                break
    ts.expect('.')
    if ts.peek().kind != 'eof':
        ts.fail("unexpected text after the query")
    return Query(tuple(atoms), head.text)


def parse_database(text: str,
                   schemas: Optional[Mapping[str, RelationSchema]] = None) -> Database:
    '''Parse one ground fact per statement.

    With `schemas` (usually `query.schemas`) relation names must be declared and facts must
    match their signature; without, signatures are inferred as mode i.
    '''
    ts = TokenStream(lex(text))
    inferred: Dict[str, RelationSchema] = {}
    facts: List[Fact] = []
    while ts.peek().kind != 'eof':
        name_tok = ts.expect_kind('ident', 'a relation name')
        key, values = _parse_split_args(ts, lambda: _parse_constant(ts, bare_text=True))
        ts.expect('.')
        where = f"line {name_tok.line}, column {name_tok.column}"
        if schemas is not None:
            schema = schemas.get(name_tok.text)
            if schema is None:
                raise DatabaseError(f"unknown relation {name_tok.text} ({where})")
        else:
            try:
                schema = inferred.setdefault(
                    name_tok.text,
                    RelationSchema(name_tok.text, len(key) + len(values), len(key)))
            except SchemaError as e:
                raise DatabaseError(f"{e} ({where})")
        if len(key) + len(values) != schema.arity or len(key) != schema.key_len:
            raise DatabaseError(
                f"arity mismatch for {name_tok.text}: expected signature "
                f"{schema.signature}, got {len(key)} key and {len(values)} value terms ({where})")
        facts.append(Fact(schema, tuple(key), tuple(values)))
    return Database.of(facts)


def print_query(q: Query) -> str:
    return f"{q.name} :- " + ",\n    ".join(str(a) for a in q.atoms) + ".\n"


def render_fact(fact: Fact) -> str:
    key = ', '.join(c.render() for c in fact.key_values)
    vals = ', '.join(c.render() for c in fact.value_values)
    return f"{fact.name}({key} | {vals})." if vals else f"{fact.name}({key} |)."


def print_database(db: Database, header: Optional[str] = None) -> str:
    lines = []
    if header:
        lines.extend(f"# {line}" for line in header.splitlines())
    lines.extend(render_fact(f) for f in db.sorted_facts)
    return '\n'.join(lines) + ('\n' if lines else '')


def load_query(path: str) -> Query:
    with open(path, 'r', encoding='utf-8') as f:
        return parse_query(f.read())


def load_database(path: str, schemas: Optional[Mapping[str, RelationSchema]] = None
                  ) -> Database:
    with open(path, 'r', encoding='utf-8') as f:
        return parse_database(f.read(), schemas)


__all__ = ['parse_query', 'parse_database', 'print_query', 'print_database', 'render_fact',
           'load_query', 'load_database', 'parse_term', 'QuerySyntaxError']
