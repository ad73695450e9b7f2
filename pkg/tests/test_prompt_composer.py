"""
Unit tests for prompt composition and presets
"""

import difflib
import pytest
import sys
import os

# Add utils to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'utils'))

from prompt_composer import (
    PRESET_IDS,
    ConfigError,
    Constraint,
    GrammarStyle,
    PromptBlock,
    PromptConfig,
    build,
    build_preset,
    load_prompt_config,
    preset,
    prompt_digest,
)


class TestPresets:
    """Test cases for the preset table"""

    def test_preset_ids(self):
        assert PRESET_IDS == ('P1', 'P2', 'P3', 'P4', 'P5', 'P6', 'P7')

    def test_preset_is_case_insensitive(self):
        assert preset('p4') == preset('P4')
        assert preset('p4').constraint == Constraint.C1

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            preset('P8')

    def test_block_lists(self):
        assert build_preset('P1').blocks == (PromptBlock.INSTRUCTION,)
        assert build_preset('P3').blocks == (
            PromptBlock.INSTRUCTION, PromptBlock.LEVEL, PromptBlock.GRAMMAR_BASE)
        assert build_preset('P7').blocks == (
            PromptBlock.INSTRUCTION, PromptBlock.LEVEL, PromptBlock.GRAMMAR_BASE,
            PromptBlock.C2, PromptBlock.EXAMPLE)

    def test_texts_are_distinct(self):
        texts = {build_preset(preset_id).text for preset_id in PRESET_IDS}
        assert len(texts) == 7

    def test_presets_are_cumulative(self):
        p3 = build_preset('P3').text
        assert build_preset('P4').text.startswith(p3)
        assert build_preset('P6').text.startswith(build_preset('P4').text)
        assert build_preset('P7').text.startswith(build_preset('P5').text)


class TestBuild:
    """Test cases for build"""

    def test_game_name_substitution(self):
        text = build_preset('P1', 'a sokoban game').text
        assert text == ('Please create a VGDL representation for a sokoban game. '
                        'Please create a game level as well.')

    def test_p6_contents(self):
        text = build_preset('P6').text
        assert text.startswith('Please create a VGDL representation')
        assert '<game> ::= game_class <eol> INDENT' in text
        assert "'<Sprite To Be Killed> <Sprite Not To Be Killed> > killSprite'" in text
        assert 'The template is based on the game Aliens.' in text

    def test_constraints_differ_in_interaction_line_only(self):
        p4 = build_preset('P4').text.splitlines()
        p5 = build_preset('P5').text.splitlines()
        changed = [
            line for line in difflib.unified_diff(p4, p5, lineterm='', n=0)
            if line.startswith(('-', '+')) and not line.startswith(('---', '+++'))
        ]
        assert len(changed) == 2
        assert 'killSprite' in changed[0]
        assert 'removeSprite' in changed[1]

    def test_constraint_requires_grammar(self):
        with pytest.raises(ConfigError):
            build(PromptConfig(constraint=Constraint.C1))

    def test_mechanics_block(self):
        config = PromptConfig(mechanics='The avatar must collect a key first.')
        prompt = build(config)
        assert prompt.blocks == (PromptBlock.INSTRUCTION, PromptBlock.MECHANICS)
        assert prompt.text.endswith('\n\nThe avatar must collect a key first.')

    def test_normalized_grammar(self):
        faithful = build(PromptConfig(include_grammar_base=True)).text
        normalized = build(PromptConfig(include_grammar_base=True,
                                        grammar_style=GrammarStyle.NORMALIZED)).text
        assert '" textgreater "' in faithful
        assert '" textgreater "' not in normalized
        assert '<char-map> ::= CHAR ">" <sprite-type>' in normalized

    def test_build_is_deterministic(self):
        first = build_preset('P7')
        second = build_preset('P7')
        assert first.text == second.text
        assert first.prompt_hash == second.prompt_hash == prompt_digest(first.text)
        assert first.preset == 'P7'


class TestLoadPromptConfig:
    """Test cases for YAML prompt configuration"""

    def test_load(self, tmp_path):
        path = tmp_path / 'prompt.yaml'
        path.write_text('prompt:\n  preset: p5\n  game: a treasure hunt game\n  grammar_style: normalized\n')
        config = load_prompt_config(path)
        assert config.preset == 'P5'
        assert config.game_name == 'a treasure hunt game'
        assert config.grammar_style == GrammarStyle.NORMALIZED

    def test_defaults_to_p7(self, tmp_path):
        path = tmp_path / 'prompt.yaml'
        path.write_text('')
        assert load_prompt_config(path).preset == 'P7'

    def test_bad_grammar_style(self, tmp_path):
        path = tmp_path / 'prompt.yaml'
        path.write_text('prompt:\n  grammar_style: fancy\n')
        with pytest.raises(ConfigError):
            load_prompt_config(path)


if __name__ == '__main__':
    pytest.main([__file__])
