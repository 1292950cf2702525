import pytest

from cqa_engine.config import DEFAULT_REPAIR_CAP, EngineConfig, load_config
from cqa_engine.errors import ConfigError
from cqa_engine.logging_utils import get_logger


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    for key in ('CQA_ENGINE_CONFIG', 'CQA_ENGINE_REPAIR_CAP', 'CQA_ENGINE_FAITHFUL',
                'CQA_ENGINE_CONSTANT_ORDER', 'CQA_ENGINE_LOG_LEVEL'):
        monkeypatch.delenv(key, raising=False)


def test_defaults():
    config = load_config()
    assert config == EngineConfig()
    assert config.repair_cap == DEFAULT_REPAIR_CAP
    assert config.faithful_codegen


def test_yaml_file(tmp_path):
    path = tmp_path / "engine.yaml"
    path.write_text("repair_cap: 64\nfaithful_codegen: false\n")
    config = load_config(str(path))
    assert config.repair_cap == 64
    assert not config.faithful_codegen


def test_env_overrides_yaml(tmp_path, monkeypatch):
    path = tmp_path / "engine.yaml"
    path.write_text("repair_cap: 64\n")
    monkeypatch.setenv('CQA_ENGINE_CONFIG', str(path))
    monkeypatch.setenv('CQA_ENGINE_REPAIR_CAP', '128')
    assert load_config().repair_cap == 128


def test_bad_values(tmp_path, monkeypatch):
    monkeypatch.setenv('CQA_ENGINE_REPAIR_CAP', 'lots')
    with pytest.raises(ConfigError):
        load_config()
    monkeypatch.delenv('CQA_ENGINE_REPAIR_CAP')
    path = tmp_path / "engine.yaml"
    path.write_text("constant_order: sideways\n")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_unknown_key(tmp_path):
    path = tmp_path / "engine.yaml"
    path.write_text("colour: blue\n")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_loggers_live_under_the_package_namespace():
    assert get_logger().name == 'cqa_engine'
    assert get_logger('pipeline').name == 'cqa_engine.pipeline'
    assert get_logger('cqa_engine.cli').name == 'cqa_engine.cli'
