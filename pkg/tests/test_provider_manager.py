"""
Unit tests for the provider registry
"""

import pytest
import sys
import os
from unittest.mock import patch

# Add utils to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'utils'))

from llm_client import ProviderConfig, ProviderConfigError, ProviderError, ProviderKind, ReplayProvider
from prompt_composer import build_preset
from provider_manager import DEFAULT_PROVIDERS_FILE, ProviderManager, load_provider_configs, providers_file

PROVIDERS_YAML = """providers:
  - name: gpt-4
    kind: replay
    model: gpt-4
    fixtures_dir: replay
  - name: local
    kind: live
    endpoint: http://localhost:8000/v1/chat/completions
    model: llama
    temperature: 0.2
"""


class TestLoadProviderConfigs:
    """Test cases for reading providers files"""

    def test_bundled_file(self):
        """Test the bundled replay configuration lists the three fixture providers"""
        configs = load_provider_configs(DEFAULT_PROVIDERS_FILE)
        assert [config.name for config in configs] == ['gpt-3.5', 'gpt-4', 'gemma-7b']
        assert all(config.kind == ProviderKind.REPLAY for config in configs)
        assert all(os.path.isdir(config.fixtures_dir) for config in configs)

    def test_yaml_entries(self, tmp_path):
        path = tmp_path / 'providers.yaml'
        path.write_text(PROVIDERS_YAML)
        replay, live = load_provider_configs(path)
        assert replay.fixtures_dir == str((tmp_path / 'replay').resolve())
        assert live.kind == ProviderKind.LIVE
        assert live.temperature == 0.2

    def test_duplicate_names(self, tmp_path):
        path = tmp_path / 'providers.yaml'
        path.write_text(PROVIDERS_YAML.replace('name: local', 'name: gpt-4'))
        with pytest.raises(ProviderConfigError, match='Duplicate'):
            load_provider_configs(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ProviderConfigError):
            load_provider_configs(tmp_path / 'missing.yaml')

    def test_providers_file_from_environment(self, monkeypatch, tmp_path):
        monkeypatch.setenv('VGDL_FORGE_PROVIDERS', str(tmp_path / 'p.yaml'))
        assert providers_file() == tmp_path / 'p.yaml'


class TestProviderManager:
    """Test cases for ProviderManager"""

    def setup_method(self):
        """Set up test fixtures"""
        self.manager = ProviderManager.from_file(DEFAULT_PROVIDERS_FILE)

    def test_initialization(self):
        assert self.manager.get_available_providers() == ['gpt-3.5', 'gpt-4', 'gemma-7b']
        assert self.manager.current_provider == 'gpt-3.5'

    def test_set_provider(self):
        self.manager.set_provider('gpt-4')
        assert self.manager.current_provider == 'gpt-4'
        self.manager.set_provider('unknown')
        assert self.manager.current_provider == 'gpt-4'

    def test_get_provider(self):
        assert isinstance(self.manager.get_provider('gemma-7b'), ReplayProvider)
        assert self.manager.get_provider('unknown') is None

    def test_complete_from_fixture(self):
        """Test the preset carried by the prompt selects the fixture"""
        text = self.manager.complete(build_preset('P7'), provider='gpt-4')
        expected = (DEFAULT_PROVIDERS_FILE.parent.parent / 'fixtures' / 'replay' / 'gpt-4' / 'p7.txt')
        assert text == expected.read_text(encoding='utf-8')

    def test_complete_returns_none_on_error(self):
        """Test provider failures are logged and turned into None"""
        with patch.object(ReplayProvider, 'complete', side_effect=ProviderError('boom')):
            assert self.manager.complete('prompt') is None

    def test_complete_unknown_provider(self):
        assert self.manager.complete('prompt', provider='unknown') is None

    def test_invalid_config_is_skipped(self):
        manager = ProviderManager([ProviderConfig(name='broken')])
        assert manager.get_available_providers() == []
        assert manager.current_provider is None

    def test_bad_file_gives_empty_manager(self, tmp_path):
        manager = ProviderManager.from_file(tmp_path / 'missing.yaml')
        assert manager.get_available_providers() == []


if __name__ == '__main__':
    pytest.main([__file__])
