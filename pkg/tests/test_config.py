import pytest

from bsmu.almostproduct.core.config import DEFAULT_TOL_ENV_VAR, env_default_tolerance
from bsmu.almostproduct.core.errors import ConfigError
from bsmu.almostproduct.verification.search import SearchConfig, SearchFamily
from bsmu.almostproduct.verification.settings import VerificationSettings


def test_packaged_defaults_match_built_in_values():
    assert VerificationSettings.load_default() == VerificationSettings()
    assert SearchConfig.load_default() == SearchConfig()


def test_config_file_names():
    assert VerificationSettings.config_file_name() == 'verification.settings.VerificationSettings.conf.yaml'
    assert SearchConfig.config_file_name() == 'verification.search.SearchConfig.conf.yaml'


def test_from_dict_converts_values():
    settings = VerificationSettings.from_dict({'exact_tol': 1})
    assert settings.exact_tol == 1.
    assert isinstance(settings.exact_tol, float)

    config = SearchConfig.from_dict({'family': 'catalog', 'dim': 6})
    assert config.family is SearchFamily.CATALOG
    assert config.dim == 6


@pytest.mark.parametrize('data', [
    {'unknown_tol': 1e-3},
    {'exact_tol': -1e-12},
    {'exact_tol': 0},
    {'exact_tol': '1e-12'},
    {'exact_tol': True},
])
def test_invalid_verification_settings(data):
    with pytest.raises(ConfigError):
        VerificationSettings.from_dict(data)


@pytest.mark.parametrize('data', [
    {'dim': 2},
    {'dim': 5},
    {'dim': 4.5},
    {'max_candidates': 0},
    {'tolerance': 0.},
    {'rejection_factor': -1.},
    {'family': 'random'},
])
def test_invalid_search_config(data):
    with pytest.raises(ConfigError):
        SearchConfig.from_dict(data)


def test_from_yaml(tmp_path):
    config_file = tmp_path / VerificationSettings.config_file_name()
    config_file.write_text('classification_tol: 1.0e-6\ntiny_torsion: 1.0e-5\n', encoding='utf-8')
    settings = VerificationSettings.from_yaml(config_file)
    assert settings.classification_tol == 1e-6
    assert settings.tiny_torsion == 1e-5
    assert settings.exact_tol == VerificationSettings().exact_tol


def test_from_yaml_rejects_bad_files(tmp_path):
    with pytest.raises(ConfigError):
        VerificationSettings.from_yaml(tmp_path / 'missing.conf.yaml')

    not_a_mapping = tmp_path / 'list.conf.yaml'
    not_a_mapping.write_text('- 1\n- 2\n', encoding='utf-8')
    with pytest.raises(ConfigError):
        VerificationSettings.from_yaml(not_a_mapping)

    empty = tmp_path / 'empty.conf.yaml'
    empty.write_text('', encoding='utf-8')
    assert VerificationSettings.from_yaml(empty) == VerificationSettings()


def test_merged_skips_missing_overrides():
    settings = VerificationSettings().merged(classification_tol=None, tiny_torsion=1e-4)
    assert settings.classification_tol == VerificationSettings().classification_tol
    assert settings.tiny_torsion == 1e-4
    with pytest.raises(ConfigError):
        VerificationSettings().merged(classification_tol=-1.)


def test_rejection_threshold():
    assert SearchConfig(tolerance=1e-9, rejection_factor=1e3).rejection_threshold == pytest.approx(1e-6)


def test_environment_tolerance(monkeypatch):
    monkeypatch.delenv(DEFAULT_TOL_ENV_VAR, raising=False)
    assert env_default_tolerance() is None

    monkeypatch.setenv(DEFAULT_TOL_ENV_VAR, '')
    assert env_default_tolerance() is None

    monkeypatch.setenv(DEFAULT_TOL_ENV_VAR, '1e-6')
    assert env_default_tolerance() == 1e-6


@pytest.mark.parametrize('value', ['abc', '0', '-1e-6'])
def test_invalid_environment_tolerance(monkeypatch, value):
    monkeypatch.setenv(DEFAULT_TOL_ENV_VAR, value)
    with pytest.raises(ConfigError):
        env_default_tolerance()
