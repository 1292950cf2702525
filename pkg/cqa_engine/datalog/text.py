#!/usr/bin/env python3
'''The .dl text format.

    # goal: certain            <- manifest lines (`# key: value`) at the top of the file
    @edb R(2).
    @goal certain.
    @stratum 0
    good_R(x, y) :- R(x, y), S(y, z).
    del_R(c1) :- R(c1, c2), !good_R(c1, c2), (c1, c2) != (1, 2).
    IdentifiedBy(a, min(b)) :- Trans(a, b).

Without `@stratum` headers the strata are computed from the dependency graph.
'''

import re
from typing import Dict, List, Optional, Tuple

from ..core.lexer import TokenStream, lex
from ..core.parser import parse_term
from ..core.terms import Term
from ..errors import DatalogSyntaxError
from .ir import BodyItem, Comparison, Literal, Program, Rule
from .validate import stratify

_MANIFEST_LINE = re.compile(r'^#\s*([A-Za-z0-9_.\-]+):\s?(.*)$')


def print_program(p: Program) -> str:
    lines: List[str] = [f"# {k}: {v}" for k, v in p.manifest.items()]
    for name in sorted(p.edb):
        lines.append(f"@edb {name}({p.edb[name]}).")
    if p.goal:
        lines.append(f"@goal {p.goal}.")
    for i, stratum in enumerate(p.strata):
        lines.append(f"@stratum {i}")
        lines.extend(str(r) for r in stratum)
    return '\n'.join(lines) + '\n'


def _read_manifest(text: str) -> Dict[str, str]:
    manifest: Dict[str, str] = {}
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        m = _MANIFEST_LINE.match(stripped)
        if not m:
            break
        manifest[m.group(1)] = m.group(2)
    return manifest


def _term_vector(ts: TokenStream) -> Tuple[Term, ...]:
    if ts.accept('('):
        items = [parse_term(ts)]
        while ts.accept(','):
            items.append(parse_term(ts))
        ts.expect(')')
        return tuple(items)
    return (parse_term(ts),)


def _parse_args(ts: TokenStream, allow_min: bool) -> Tuple[Tuple[Term, ...], Optional[int]]:
    if not ts.accept('('):
        return (), None
    args: List[Term] = []
    min_from: Optional[int] = None
    if not ts.at(')'):
        while True:
            if allow_min and ts.at('min', 'ident') and ts.peek(1).text == '(':
                if min_from is not None:
                    ts.fail("only one min group is allowed")
                ts.next()
                ts.expect('(')
                min_from = len(args)
                args.append(parse_term(ts))
                while ts.accept(','):
                    args.append(parse_term(ts))
                ts.expect(')')
            else:
                args.append(parse_term(ts))
            if not ts.accept(','):
                break
    ts.expect(')')
    if min_from is not None and not ts.at(':-'):
        ts.fail("a min head needs a body")
    return tuple(args), min_from


def _parse_body_item(ts: TokenStream) -> BodyItem:
    if ts.accept('!'):
        name = ts.expect_kind('ident', 'a predicate name')
        args, _ = _parse_args(ts, allow_min=False)
        return Literal(name.text, args, negated=True)
    tok, after = ts.peek(), ts.peek(1)
    if tok.kind == 'ident' and not (after.kind == 'punct' and after.text in ('=', '!=')):
        name = ts.next()
        args, _ = _parse_args(ts, allow_min=False)
        return Literal(name.text, args)
    left = _term_vector(ts)
    op = ts.peek()
    if op.text not in ('=', '!='):
        ts.fail(f"expected '=' or '!=', found {op.text or 'end of input'!r}", op)
    ts.next()
    right = _term_vector(ts)
    if len(left) != len(right):
        ts.fail("comparison sides have different lengths", op)
    return Comparison(op.text, left, right)


def _parse_rule(ts: TokenStream) -> Rule:
    name = ts.expect_kind('ident', 'a predicate name')
    args, min_from = _parse_args(ts, allow_min=True)
    body: List[BodyItem] = []
    if ts.accept(':-'):
        body.append(_parse_body_item(ts))
        while ts.accept(','):
            body.append(_parse_body_item(ts))
    ts.expect('.')
    return Rule(Literal(name.text, args), tuple(body), min_from)


def parse_program(text: str) -> Program:
    ts = TokenStream(lex(text, DatalogSyntaxError), DatalogSyntaxError)
    edb: Dict[str, int] = {}
    goal: Optional[str] = None
    declared: List[List[Rule]] = []
    loose: List[Rule] = []
    while ts.peek().kind != 'eof':
        tok = ts.peek()
        if tok.kind == 'directive':
            ts.next()
            if tok.text == 'edb':
                name = ts.expect_kind('ident', 'a relation name')
                ts.expect('(')
                arity = ts.expect_kind('int', 'an arity')
                ts.expect(')')
                ts.expect('.')
                edb[name.text] = arity.value  # type: ignore[assignment]
            elif tok.text == 'goal':
                goal = ts.expect_kind('ident', 'a goal predicate').text
                ts.expect('.')
            else:
                number = ts.expect_kind('int', 'a stratum number')
                if number.value != len(declared):
                    ts.fail(f"stratum {number.value} out of sequence", number)
                declared.append([])
            continue
        rule = _parse_rule(ts)
        (declared[-1] if declared else loose).append(rule)
    if declared and loose:
        raise DatalogSyntaxError("rules appear before the first @stratum header", 1, 1)
    strata = declared if declared else stratify(loose, edb)
    return Program(strata, edb, goal, _read_manifest(text))
