"""
Prompt composition from versioned context blocks and the P1-P7 presets
"""

import hashlib
import logging
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Optional, Tuple

import yaml

logger = logging.getLogger(__name__)

PROMPTS_DIR = Path(__file__).resolve().parent.parent / 'prompts'
DEFAULT_ASSET_VERSION = 'v1'
DEFAULT_GAME_NAME = 'a maze game'
GAME_PLACEHOLDER = '<Game>'
BLOCK_SEPARATOR = '\n\n'


class ConfigError(Exception):
    """Raised for an invalid prompt configuration"""


class Constraint(str, Enum):
    C1 = 'c1'
    C2 = 'c2'


class GrammarStyle(str, Enum):
    FAITHFUL = 'faithful'
    NORMALIZED = 'normalized'


class PromptBlock(str, Enum):
    INSTRUCTION = 'instruction'
    MECHANICS = 'mechanics'
    LEVEL = 'level'
    GRAMMAR_BASE = 'grammar_base'
    C1 = 'c1'
    C2 = 'c2'
    EXAMPLE = 'example'


@dataclass(frozen=True)
class PromptConfig:
    game_name: str = DEFAULT_GAME_NAME
    include_level: bool = False
    include_grammar_base: bool = False
    constraint: Optional[Constraint] = None
    include_example: bool = False
    mechanics: Optional[str] = None
    grammar_style: GrammarStyle = GrammarStyle.FAITHFUL
    preset: Optional[str] = None


@dataclass(frozen=True)
class PromptText:
    text: str
    blocks: Tuple[PromptBlock, ...]
    preset: Optional[str] = None

    @property
    def prompt_hash(self):
        return prompt_digest(self.text)


# Context blocks per preset, cumulative down the table
PRESETS = {
    'P1': dict(),
    'P2': dict(include_level=True),
    'P3': dict(include_level=True, include_grammar_base=True),
    'P4': dict(include_level=True, include_grammar_base=True, constraint=Constraint.C1),
    'P5': dict(include_level=True, include_grammar_base=True, constraint=Constraint.C2),
    'P6': dict(include_level=True, include_grammar_base=True, constraint=Constraint.C1,
               include_example=True),
    'P7': dict(include_level=True, include_grammar_base=True, constraint=Constraint.C2,
               include_example=True),
}

PRESET_IDS = tuple(PRESETS)


def prompt_digest(text):
    """SHA-256 hex digest of a prompt text"""
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def normalize_preset_id(preset_id):
    key = str(preset_id).strip().upper()
    if key not in PRESETS:
        raise ConfigError(f"Unknown preset '{preset_id}'. Available presets: {', '.join(PRESET_IDS)}")
    return key


@lru_cache(maxsize=None)
def load_asset(name, version=DEFAULT_ASSET_VERSION):
    """
    Read one prompt block asset

    Args:
        name (str): Asset name without extension
        version (str): Asset directory under prompts/

    Returns:
        str: Asset text without its trailing newline
    """
    path = PROMPTS_DIR / version / f'{name}.txt'
    try:
        return path.read_text(encoding='utf-8').rstrip('\n')
    except FileNotFoundError:
        raise ConfigError(f'Prompt asset not found: {path}')


def _grammar_text(style, version):
    text = load_asset(PromptBlock.GRAMMAR_BASE.value, version)
    if style is GrammarStyle.NORMALIZED:
        text = text.replace('" textgreater "', '">"')
    return text


def preset(preset_id, game_name=DEFAULT_GAME_NAME):
    """
    Configuration of a named preset

    Args:
        preset_id (str): P1..P7, case-insensitive
        game_name (str): Name substituted into the instruction

    Returns:
        PromptConfig: The preset's block selection
    """
    key = normalize_preset_id(preset_id)
    return PromptConfig(game_name=game_name, preset=key, **PRESETS[key])


def build(config, version=DEFAULT_ASSET_VERSION):
    """
    Assemble the prompt text for a configuration

    Args:
        config (PromptConfig): Selected blocks
        version (str): Asset version

    Returns:
        PromptText: Text plus the ordered block list

    Raises:
        ConfigError: If a constraint is chosen without the grammar base
    """
    if config.constraint is not None and not config.include_grammar_base:
        raise ConfigError(
            f'Constraint {config.constraint.name} extends the grammar; include_grammar_base is required'
        )

    parts = []
    blocks = []

    def add(block, text):
        blocks.append(block)
        parts.append(text)

    instruction = load_asset(PromptBlock.INSTRUCTION.value, version)
    add(PromptBlock.INSTRUCTION, instruction.replace(GAME_PLACEHOLDER, config.game_name))
    if config.mechanics:
        add(PromptBlock.MECHANICS, config.mechanics.strip())
    if config.include_level:
        add(PromptBlock.LEVEL, load_asset(PromptBlock.LEVEL.value, version))
    if config.include_grammar_base:
        add(PromptBlock.GRAMMAR_BASE, _grammar_text(config.grammar_style, version))
    if config.constraint is not None:
        block = PromptBlock(config.constraint.value)
        add(block, load_asset(block.value, version))
    if config.include_example:
        add(PromptBlock.EXAMPLE, load_asset(PromptBlock.EXAMPLE.value, version))

    return PromptText(text=BLOCK_SEPARATOR.join(parts), blocks=tuple(blocks), preset=config.preset)


def build_preset(preset_id, game_name=DEFAULT_GAME_NAME):
    return build(preset(preset_id, game_name))


def load_prompt_config(path):
    """
    Read the prompt section of a YAML configuration file

    Args:
        path (str or Path): YAML file with a 'prompt' mapping

    Returns:
        PromptConfig: Preset configuration with any overrides applied
    """
    with open(path, 'r', encoding='utf-8') as f:
        data = yaml.safe_load(f) or {}

    section = data.get('prompt', {})
    if not isinstance(section, dict):
        raise ConfigError(f"'prompt' in {path} must be a mapping")

    config = preset(section.get('preset', 'P7'), section.get('game', DEFAULT_GAME_NAME))
    if 'grammar_style' in section:
        try:
            config = replace(config, grammar_style=GrammarStyle(section['grammar_style']))
        except ValueError:
            raise ConfigError(f"Unknown grammar_style '{section['grammar_style']}'")
    if section.get('mechanics'):
        config = replace(config, mechanics=str(section['mechanics']))

    logger.info(f"Loaded prompt configuration {config.preset} for '{config.game_name}' from {path}")
    return config
