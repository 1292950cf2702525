import pytest

from cqa_engine.cli import ERROR_EXIT, build_parser, main


@pytest.fixture(autouse=True)
def isolated(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    for key in ('CQA_ENGINE_CONFIG', 'CQA_ENGINE_REPAIR_CAP', 'CQA_ENGINE_FAITHFUL',
                'CQA_ENGINE_CONSTANT_ORDER', 'CQA_ENGINE_LOG_LEVEL'):
        monkeypatch.delenv(key, raising=False)


def _path(fixtures_dir, name):
    return str(fixtures_dir / name)


def test_classify_exit_codes(fixtures_dir, capsys):
    assert main(['classify', '-q', _path(fixtures_dir, 'mov.cqa')]) == 0
    assert main(['classify', '-q', _path(fixtures_dir, 'c3.cqa')]) == 1
    out = capsys.readouterr().out
    assert "class: LSPACE_NOT_FO" in out
    assert "key_join: true" in out
    assert main(['classify', '-q', _path(fixtures_dir, 'strong_pair.cqa')]) == 2


def test_classify_reports_saturation(fixtures_dir, capsys):
    main(['classify', '-q', _path(fixtures_dir, 'qsat.cqa')])
    out = capsys.readouterr().out
    assert "saturation: N_sat_1" in out and "proof=<S1, S2>" in out


def test_eval_and_oracle(fixtures_dir, capsys):
    args = ['-q', _path(fixtures_dir, 'c3.cqa'), '-d', _path(fixtures_dir, 'fig1.facts')]
    assert main(['eval'] + args) == 0
    assert capsys.readouterr().out == "false\n"
    assert main(['oracle'] + args) == 0
    assert capsys.readouterr().out == "false\n"
    assert main(['eval', '--trace', '-q', _path(fixtures_dir, 'rs.cqa'),
                 '-d', _path(fixtures_dir, 'rs.facts')]) == 0
    out = capsys.readouterr().out
    assert out.startswith("classify: depth=0")
    assert out.endswith("answer: value=true oracle_fallback=false\n")


def test_rewrite_then_run(fixtures_dir, tmp_path, capsys):
    program = tmp_path / "c3.dl"
    assert main(['rewrite', '-q', _path(fixtures_dir, 'c3.cqa'), '-o', str(program)]) == 0
    assert program.read_text().startswith("# goal: certain")
    assert main(['run', '-p', str(program), '-d', _path(fixtures_dir, 'fig1.facts')]) == 0
    assert capsys.readouterr().out == "false\n"


def test_rewrite_refuses_conp(fixtures_dir, capsys):
    assert main(['rewrite', '-q', _path(fixtures_dir, 'strong_pair.cqa')]) == ERROR_EXIT
    assert "coNP-complete" in capsys.readouterr().err


def test_graph(fixtures_dir, capsys):
    assert main(['graph', '--kind', 'quotient', '-q', _path(fixtures_dir, 'c3.cqa'),
                 '-d', _path(fixtures_dir, 'fig1.facts')]) == 0
    assert capsys.readouterr().out.startswith("digraph quotient {")
    assert main(['graph', '--kind', 'chook', '--cycle', 'R,T,S',
                 '-q', _path(fixtures_dir, 'c3.cqa'),
                 '-d', _path(fixtures_dir, 'fig1.facts')]) == ERROR_EXIT


def test_gen_then_diff(tmp_path, capsys):
    out_dir = tmp_path / "corpus"
    assert main(['gen', '--seed', '4', '--count', '2', '-o', str(out_dir)]) == 0
    assert sorted(p.name for p in out_dir.iterdir()) == [
        'instance_4.cqa', 'instance_4.facts', 'instance_5.cqa', 'instance_5.facts']
    assert main(['diff', '-q', str(out_dir / 'instance_4.cqa'),
                 '-d', str(out_dir / 'instance_4.facts')]) == 0
    assert "1 instance(s) agree" in capsys.readouterr().out


def test_seeded_diff(capsys):
    assert main(['diff', '--seed', '0', '--count', '5', '--builtin']) == 0
    assert "5 instance(s) agree" in capsys.readouterr().out


def test_errors_exit_with_three(fixtures_dir, tmp_path, capsys):
    assert main(['eval', '-q', _path(fixtures_dir, 'c3.cqa')]) == ERROR_EXIT
    assert "missing required option" in capsys.readouterr().err
    assert main(['classify', '-q', str(tmp_path / 'missing.cqa')]) == ERROR_EXIT
    bad = tmp_path / "bad.cqa"
    bad.write_text("q :- R(x | y")
    assert main(['classify', '-q', str(bad)]) == ERROR_EXIT


def test_parser_defaults():
    args = build_parser().parse_args(['rewrite', '-q', 'x.cqa'])
    assert args.faithful is None
    args = build_parser().parse_args(['rewrite', '--builtin', '-q', 'x.cqa'])
    assert args.faithful is False
