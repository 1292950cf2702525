#!/usr/bin/env python3
"""
CQA Command Line

Usage:
    cqa classify -q query.cqa
    cqa rewrite -q query.cqa -o program.dl [--builtin]
    cqa eval -q query.cqa -d db.facts [--trace]
    cqa oracle -q query.cqa -d db.facts [--cap N]
    cqa run -p program.dl -d db.facts [--goal G] [--dump]
    cqa graph --kind quotient -q query.cqa -d db.facts
    cqa gen --seed 7 --count 10 -o corpus/
    cqa diff --seed 0 --count 1000 [-o counterexample]

Exit codes: `classify` returns 0, 1 or 2 for FO, LSPACE_NOT_FO and CONP_COMPLETE; `diff`
returns 1 on a disagreement; every command returns 3 on an error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from .attack_analysis import attack_graph, classify_complexity, has_key_join_property
from .codegen.pipeline_program import compose_pipeline
from .config import EngineConfig, load_config
from .core.database import Database
from .core.parser import load_database, load_query, print_database, print_query
from .core.schema import Query
from .core.terms import ConstantOrder
from .datalog.evaluator import evaluate, goal_holds
from .datalog.text import parse_program
from .datalog.validate import validate
from .dot_export import (GRAPH_KINDS, attack_graph_dot, hook_graph_dot, mgraph_dot,
                         quotient_dot)
from .errors import CQAError, PreconditionError
from .generator import GeneratorKnobs, minimize_counterexample, random_instance
from .logging_utils import setup_logging
from .mgraph import MCycle, block_quotient, chook_graph, find_mcycle, hook_graph, m_graph
from .pipeline import certain_answer_direct, certain_answer_oracle, differential_check
from .saturation import saturate

logger = logging.getLogger(__name__)

ERROR_EXIT = 3

Result = Dict[str, Any]


def _order(config: EngineConfig) -> ConstantOrder:
    return ConstantOrder(config.constant_order)


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise PreconditionError(f"missing required option(s): {', '.join(missing)}")


def _load_instance(args: argparse.Namespace) -> Tuple[Query, Database]:
    _require(args, 'query', 'db')
    q = load_query(args.query)
    return q, load_database(args.db, q.schemas)


def _write(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).expanduser().write_text(text, encoding='utf-8')
        logger.info(f"Wrote {output}")
    else:
        sys.stdout.write(text)


def cmd_classify(args: argparse.Namespace, config: EngineConfig) -> Result:
    _require(args, 'query')
    q = load_query(args.query)
    complexity = classify_complexity(q)
    lines = [f"query: {q}", f"class: {complexity.value}",
             f"key_join: {str(has_key_join_property(q)).lower()}"]
    for attack in attack_graph(q).edges():
        lines.append(f"attack: {attack.describe()}")
    for step in saturate(q).added:
        lines.append(f"saturation: {step.atom} for {','.join(sorted(step.lhs))}->{step.target} "
                     f"proof={step.proof}")
    return {'success': True, 'output': '\n'.join(lines) + '\n',
            'exit_code': complexity.exit_code}


def cmd_rewrite(args: argparse.Namespace, config: EngineConfig) -> Result:
    _require(args, 'query')
    q = load_query(args.query)
    faithful = config.faithful_codegen if args.faithful is None else args.faithful
    compiled = compose_pipeline(q, faithful)
    report = validate(compiled.program)
    logger.info(f"Program for {q.name}: {len(compiled.program)} rules, "
                f"{len(compiled.stages)} stage(s), valid={report.ok}")
    _write(compiled.render(), args.output)
    return {'success': report.ok, 'output': '',
            'error': '; '.join(report.errors) if not report.ok else None}


def cmd_eval(args: argparse.Namespace, config: EngineConfig) -> Result:
    q, db = _load_instance(args)
    trace = certain_answer_direct(q, db, _order(config), args.cap or config.repair_cap)
    text = trace.render() if args.trace else f"{str(trace.answer).lower()}\n"
    return {'success': True, 'output': text}


def cmd_oracle(args: argparse.Namespace, config: EngineConfig) -> Result:
    q, db = _load_instance(args)
    answer = certain_answer_oracle(q, db, args.cap or config.repair_cap)
    return {'success': True, 'output': f"{str(answer).lower()}\n"}


def cmd_run(args: argparse.Namespace, config: EngineConfig) -> Result:
    _require(args, 'program', 'db')
    program = parse_program(Path(args.program).read_text(encoding='utf-8'))
    db = load_database(args.db)
    store = evaluate(program, db, _order(config))
    lines = []
    if args.dump:
        for name in sorted(store):
            for row in sorted(store[name], key=lambda r: tuple(c.sort_key for c in r)):
                lines.append(f"{name}({', '.join(c.render() for c in row)}).")
    goal = args.goal or program.goal
    if goal is not None:
        lines.append(str(goal_holds(program, store, goal)).lower())
    return {'success': True, 'output': '\n'.join(lines) + '\n' if lines else ''}


def _cycle(q: Query, names: Optional[str]) -> MCycle:
    if names:
        return MCycle.of(q, [n.strip() for n in names.split(',') if n.strip()])
    cycle = find_mcycle(q)
    if cycle is None:
        raise PreconditionError(f"{q.name} has no M-cycle; pass --cycle explicitly")
    return cycle


def cmd_graph(args: argparse.Namespace, config: EngineConfig) -> Result:
    if args.kind in ('attack', 'mgraph'):
        _require(args, 'query')
        q = load_query(args.query)
        text = attack_graph_dot(attack_graph(q)) if args.kind == 'attack' \
            else mgraph_dot(m_graph(q))
    else:
        q, db = _load_instance(args)
        if args.kind == 'hook':
            text = hook_graph_dot(hook_graph(q, db))
        else:
            chg = chook_graph(q, _cycle(q, args.cycle), db)
            text = hook_graph_dot(chg) if args.kind == 'chook' \
                else quotient_dot(block_quotient(chg))
    _write(text, args.output)
    return {'success': True, 'output': ''}


def _knobs(args: argparse.Namespace, config: EngineConfig) -> GeneratorKnobs:
    return GeneratorKnobs(max_atoms=args.atoms, max_arity=args.arity,
                          key_join_bias=args.key_join_bias, max_block_size=args.block_size,
                          repair_cap=min(config.repair_cap, GeneratorKnobs.repair_cap))


def cmd_gen(args: argparse.Namespace, config: EngineConfig) -> Result:
    out_dir = Path(args.output or '.').expanduser()
    out_dir.mkdir(parents=True, exist_ok=True)
    knobs = _knobs(args, config)
    for i in range(args.count):
        seed = args.seed + i
        q, db = random_instance(seed, knobs)
        (out_dir / f"instance_{seed}.cqa").write_text(print_query(q), encoding='utf-8')
        (out_dir / f"instance_{seed}.facts").write_text(
            print_database(db, header=f"seed: {seed}"), encoding='utf-8')
    return {'success': True, 'output': f"wrote {args.count} instance(s) to {out_dir}\n"}


def cmd_diff(args: argparse.Namespace, config: EngineConfig) -> Result:
    order = _order(config)
    faithful = config.faithful_codegen if args.faithful is None else args.faithful
    cap = args.cap or config.repair_cap

    def disagrees(q: Query, db: Database) -> bool:
        return not differential_check(q, db, cap, faithful, order).agree

    if args.query is not None:
        instances = [('given', *_load_instance(args))]
    else:
        knobs = _knobs(args, config)
        instances = [(str(args.seed + i), *random_instance(args.seed + i, knobs))
                     for i in range(args.count)]
    for label, q, db in instances:
        result = differential_check(q, db, cap, faithful, order)
        if result.agree:
            continue
        logger.warning(f"Instance {label} disagrees: {result}")
        shrunk = minimize_counterexample(q, db, disagrees)
        dump = (f"# instance: {label}\n# {differential_check(q, shrunk, cap, faithful, order)}\n"
                + ''.join(f"# {line}\n" for line in print_query(q).splitlines())
                + print_database(shrunk))
        _write(dump, args.output)
        return {'success': True, 'output': '', 'exit_code': 1}
    return {'success': True, 'output': f"{len(instances)} instance(s) agree\n"}


COMMANDS: Dict[str, Callable[[argparse.Namespace, EngineConfig], Result]] = {
    'classify': cmd_classify,
    'rewrite': cmd_rewrite,
    'eval': cmd_eval,
    'oracle': cmd_oracle,
    'run': cmd_run,
    'graph': cmd_graph,
    'gen': cmd_gen,
    'diff': cmd_diff,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='cqa',
        description="Consistent query answering for primary keys: classification, "
                    "Datalog rewriting and certain-answer evaluation")
    parser.add_argument('--config', help="YAML configuration file")
    parser.add_argument('--log-level', help="Override the configured log level")
    sub = parser.add_subparsers(dest='command', required=True)

    def command(name: str, text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument('-q', '--query', help="Query file (.cqa)")
        p.add_argument('-d', '--db', help="Database file (.facts)")
        p.add_argument('-o', '--output', help="Output file (default: stdout)")
        p.add_argument('--cap', type=int, help="Repair cap for the brute-force oracle")
        return p

    command('classify', "Report the complexity class, attack graph and saturation")
    p = command('rewrite', "Compile the query into a stratified Datalog program")
    p.add_argument('--faithful', dest='faithful', action='store_true', default=None,
                   help="Key (dis)equality through eq/diseq predicates")
    p.add_argument('--builtin', dest='faithful', action='store_false',
                   help="Key (dis)equality through vector built-ins")
    p = command('eval', "Certain answer by direct evaluation")
    p.add_argument('--trace', action='store_true', help="Print the stage trace")
    command('oracle', "Certain answer by repair enumeration")
    p = command('run', "Evaluate a Datalog program on a database")
    p.add_argument('-p', '--program', help="Program file (.dl)")
    p.add_argument('--goal', help="Goal predicate (default: the program's manifest goal)")
    p.add_argument('--dump', action='store_true', help="Print every derived relation")
    p = command('graph', "Export a graph as DOT")
    p.add_argument('--kind', choices=GRAPH_KINDS, default='attack')
    p.add_argument('--cycle', help="Comma-separated M-cycle for chook/quotient")
    for name, text in (('gen', "Write seeded random instances"),
                       ('diff', "Check direct, oracle and program answers agree")):
        p = command(name, text)
        p.add_argument('--seed', type=int, default=0)
        p.add_argument('--count', type=int, default=10)
        p.add_argument('--atoms', type=int, default=GeneratorKnobs.max_atoms)
        p.add_argument('--arity', type=int, default=GeneratorKnobs.max_arity)
        p.add_argument('--key-join-bias', type=float, default=GeneratorKnobs.key_join_bias)
        p.add_argument('--block-size', type=int, default=GeneratorKnobs.max_block_size)
        if name == 'diff':
            p.add_argument('--faithful', dest='faithful', action='store_true', default=None)
            p.add_argument('--builtin', dest='faithful', action='store_false')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        setup_logging(args.log_level or config.log_level)
        result = COMMANDS[args.command](args, config)
    except (CQAError, OSError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return ERROR_EXIT

    if not result['success']:
        print(f"Error: {result.get('error')}", file=sys.stderr)
        return ERROR_EXIT
    sys.stdout.write(result.get('output', ''))
    return result.get('exit_code', 0)


if __name__ == "__main__":
    sys.exit(main())
