import pytest

from config.settings import DEFAULT_ENUMERATION_CAP, get_settings, reload_settings
from config.suite_profiles import ProfileManager, get_profile, list_profiles


def test_defaults(monkeypatch):
    for name in ('LEIBNIZ_ENUMERATION_CAP', 'LEIBNIZ_MAX_DIM', 'LEIBNIZ_OUTPUT_DIR', 'LEIBNIZ_LOG_LEVEL'):
        monkeypatch.delenv(name, raising=False)
    settings = get_settings()
    assert settings.enumeration_cap == DEFAULT_ENUMERATION_CAP
    assert settings.max_dim == 32
    assert settings.output_dir == 'downloads'
    assert settings.log_level == 'WARNING'


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv('LEIBNIZ_ENUMERATION_CAP', '128')
    monkeypatch.setenv('LEIBNIZ_LOG_LEVEL', 'debug')
    settings = reload_settings()
    assert settings.enumeration_cap == 128
    assert settings.log_level == 'DEBUG'
    assert get_settings() is settings


@pytest.mark.parametrize('raw', ['many', '0', '-4'])
def test_bad_integers_are_rejected(monkeypatch, raw):
    monkeypatch.setenv('LEIBNIZ_MAX_DIM', raw)
    with pytest.raises(ValueError, match='LEIBNIZ_MAX_DIM'):
        get_settings()


def test_profiles():
    ids = [p['id'] for p in list_profiles()]
    assert ids == ['quick', 'default', 'acceptance', 'explore']
    profile = get_profile('quick')
    profile['fields'].append('7')
    assert get_profile('quick')['fields'] == ['2', '3']
    with pytest.raises(KeyError):
        get_profile('weekly')


def test_custom_profiles():
    manager = ProfileManager()
    with pytest.raises(ValueError):
        manager.add_custom_profile('partial', {'fields': ['2']})
    manager.add_custom_profile('tiny', {'name': 'Tiny', 'description': 'one instance', 'fields': ['2'],
                                        'max_dim': 3, 'budget': 1, 'k_max': 2, 'seed': 1,
                                        'drop_hypotheses': False})
    assert manager.get_profile('tiny')['budget'] == 1
