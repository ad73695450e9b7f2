"""
Registry of configured LLM providers
"""

import logging
import os
from pathlib import Path

import yaml
from dotenv import load_dotenv

from llm_client import ProviderConfig, ProviderConfigError, ProviderError, create_provider

load_dotenv()
logger = logging.getLogger(__name__)

ROOT_DIR = Path(__file__).resolve().parent.parent
DEFAULT_PROVIDERS_FILE = ROOT_DIR / 'config' / 'providers.yaml'


def providers_file():
    """Providers file from VGDL_FORGE_PROVIDERS, else the bundled replay configuration"""
    return Path(os.getenv('VGDL_FORGE_PROVIDERS', str(DEFAULT_PROVIDERS_FILE)))


def load_provider_configs(path):
    """
    Read provider configurations from YAML

    Args:
        path (str or Path): File with a 'providers' list

    Returns:
        list: ProviderConfig per entry, relative paths resolved against the file

    Raises:
        ProviderConfigError: On a malformed file or entry
    """
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ProviderConfigError(f'Cannot read providers file {path}: {str(e)}')

    entries = data.get('providers', [])
    if not isinstance(entries, list):
        raise ProviderConfigError(f"'providers' in {path} must be a list")
    configs = [ProviderConfig.from_dict(entry, base_dir=path.parent) for entry in entries]

    names = [config.name for config in configs]
    duplicates = {name for name in names if names.count(name) > 1}
    if duplicates:
        raise ProviderConfigError(f"Duplicate provider names: {', '.join(sorted(duplicates))}")
    return configs


class ProviderManager:
    """Manages the configured providers and the current selection"""

    def __init__(self, configs=None):
        self.configs = {}
        self.providers = {}
        self.default_provider = None
        self.current_provider = None

        for config in configs or []:
            self.register(config)

    @classmethod
    def from_file(cls, path=None):
        path = path or providers_file()
        try:
            configs = load_provider_configs(path)
        except ProviderConfigError as e:
            logger.error(str(e))
            configs = []
        manager = cls(configs)
        logger.info(f'Loaded {len(manager.providers)} provider(s) from {path}')
        return manager

    def register(self, config):
        """Create and register the provider for a configuration"""
        try:
            self.providers[config.name] = create_provider(config)
        except ProviderConfigError as e:
            logger.error(f'Skipping provider {config.name}: {str(e)}')
            return
        self.configs[config.name] = config
        if self.default_provider is None:
            self.default_provider = config.name
            self.current_provider = config.name

    def get_available_providers(self):
        """Get list of available provider names"""
        return list(self.providers.keys())

    def set_provider(self, provider_name):
        """Set the current provider"""
        if provider_name in self.providers:
            self.current_provider = provider_name
            logger.info(f'Switched to {provider_name} provider')
        else:
            available = ', '.join(self.get_available_providers())
            logger.warning(f'Provider {provider_name} not available. Available providers: {available}')

    def get_provider(self, provider_name=None):
        """Get a provider instance, the current one by default"""
        name = provider_name or self.current_provider
        return self.providers.get(name)

    def complete(self, prompt, provider=None):
        """
        Get a completion, logging failures instead of raising

        Args:
            prompt (PromptText): Prompt to send
            provider (str): Provider name, current provider if None

        Returns:
            str or None: Response text, None on failure
        """
        name = provider or self.current_provider
        instance = self.providers.get(name)
        if instance is None:
            logger.error(f'Provider {name} is not configured')
            return None
        try:
            return instance.complete(prompt)
        except ProviderError as e:
            logger.error(f'Error getting completion from {name}: {str(e)}')
            return None


# Global provider registry over the default providers file
provider_manager = ProviderManager.from_file()
