"""
Unit tests for rule-based validation and outcome classification
"""

import pytest
import sys
import os
from pathlib import Path

# Add utils to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'utils'))

from catalog import SAMPLE_MAZE_LEVEL, SAMPLE_MAZE_RULES
from response_extractor import LevelPlacement, extract_candidates
from vgdl_parser import ParserOptions, parse_game, parse_level
from vgdl_validator import (
    ErrorCode,
    ErrorFamily,
    Outcome,
    ValidatorOptions,
    check_comment_mappings,
    check_interactions,
    check_references,
    level_matches_alphabet,
    resolve_roles,
    validate,
    validate_candidate,
)

FIXTURES_DIR = Path(__file__).resolve().parent.parent / 'fixtures' / 'replay'


def fixture_report(provider, preset_id, options=None):
    text = (FIXTURES_DIR / provider / f"{preset_id}.txt").read_text(encoding='utf-8')
    return validate_candidate(extract_candidates(text)[0], options)


def maze_with(interactions, terminations='SpriteCounter stype=goal limit=0 win=True'):
    lines = [
        'BasicGame',
        '    SpriteSet',
        '        wall > Immovable',
        '        avatar > MovingAvatar',
        '        goal > Immovable',
        '    LevelMapping',
        '        W > wall',
        '        A > avatar',
        '        G > goal',
        '    InteractionSet',
    ]
    lines += [f"        {rule}" for rule in interactions]
    lines += ['    TerminationSet', f"        {terminations}"]
    return '\n'.join(lines) + '\n'


LEVEL = 'WWWW\nWAGW\nWWWW'


class TestErrorCodes:
    """Test cases for the error taxonomy"""

    def test_stable_strings(self):
        assert ErrorCode.SYNTAX.value == 'unparsable.syntax'
        assert ErrorCode.NO_LEVEL.value == 'unmappable.no_level'

    def test_families(self):
        assert ErrorCode.KEYWORD.family == ErrorFamily.UNPARSABLE
        assert ErrorCode.TERMINATION.family == ErrorFamily.ILLOGICAL
        assert ErrorCode.SPRITE.family == ErrorFamily.UNMAPPABLE

    def test_outcome_classes(self):
        assert Outcome.classify(True, True) == Outcome.G
        assert Outcome.classify(True, False) == Outcome.R
        assert Outcome.classify(False, True) == Outcome.L
        assert Outcome.classify(False, False) == Outcome.W


class TestValidate:
    """Test cases for validate"""

    def test_correct_maze(self):
        report = validate(SAMPLE_MAZE_RULES, SAMPLE_MAZE_LEVEL)
        assert report.correct
        assert report.outcome == Outcome.G
        assert report.errors == ()
        assert report.spec is not None and report.level is not None

    def test_c1_kill_direction(self):
        report = validate(maze_with(['avatar wall > stepBack', 'goal avatar > killSprite']), LEVEL)
        assert report.correct

    def test_wrong_kill_direction(self):
        report = validate(maze_with(['avatar wall > stepBack', 'avatar goal > killSprite']), LEVEL)
        assert report.codes() == [ErrorCode.INTERACTION]
        assert report.outcome == Outcome.L

    def test_wrong_remove_direction(self):
        report = validate(maze_with(['avatar wall > stepBack', 'goal avatar > removeSprite']), LEVEL)
        assert report.codes() == [ErrorCode.INTERACTION]

    def test_missing_step_back(self):
        report = validate(maze_with(['avatar goal > removeSprite']), LEVEL)
        assert report.codes() == [ErrorCode.INTERACTION]

    def test_no_win_termination(self):
        text = maze_with(['avatar wall > stepBack', 'avatar goal > removeSprite'],
                         'SpriteCounter stype=avatar limit=0 win=False')
        report = validate(text, LEVEL)
        assert ErrorCode.TERMINATION in report.codes()

    def test_termination_true_at_start(self):
        text = maze_with(['avatar wall > stepBack', 'avatar goal > removeSprite'],
                         'SpriteCounter stype=goal limit=1 win=True')
        report = validate(text, LEVEL)
        assert report.codes() == [ErrorCode.TERMINATION]

    def test_malformed_sprite_counter(self):
        text = maze_with(['avatar wall > stepBack', 'avatar goal > removeSprite'],
                         'SpriteCounter stype=goal win=True')
        report = validate(text, LEVEL)
        assert report.codes() == [ErrorCode.TERMINATION]
        assert 'missing limit' in report.errors[0].detail

    def test_missing_block(self):
        text = SAMPLE_MAZE_RULES.replace('    TerminationSet\n        SpriteCounter      stype=goal    limit=0 win=True\n', '')
        report = validate(text, SAMPLE_MAZE_LEVEL)
        assert ErrorCode.COMPONENT in report.codes()
        assert ErrorCode.TERMINATION in report.codes()

    def test_no_level(self):
        report = validate(SAMPLE_MAZE_RULES)
        assert report.codes() == [ErrorCode.NO_LEVEL]
        assert report.outcome == Outcome.R

    def test_inline_level(self):
        report = validate(SAMPLE_MAZE_RULES, SAMPLE_MAZE_LEVEL, LevelPlacement.INLINE)
        assert report.codes() == [ErrorCode.PLACE]

    def test_unmapped_character(self):
        report = validate(SAMPLE_MAZE_RULES, 'WWWW\nWAGX\nWWWW')
        assert report.codes() == [ErrorCode.MAPPING]
        assert report.errors[0].location == (3, 1)

    def test_hash_in_level(self):
        report = validate(SAMPLE_MAZE_RULES, '####\n#AG#\n####')
        assert ErrorCode.MAPPING in report.codes()

    def test_two_avatars(self):
        report = validate(SAMPLE_MAZE_RULES, 'WWWWW\nWAAGW\nWWWWW')
        assert report.codes() == [ErrorCode.SPRITE]

    def test_missing_goal(self):
        text = SAMPLE_MAZE_RULES
        report = validate(text, 'WWWW\nWA W\nWWWW')
        assert ErrorCode.SPRITE in report.codes()
        assert ErrorCode.TERMINATION in report.codes()

    def test_alphabet_can_be_disabled(self):
        text = SAMPLE_MAZE_RULES.replace('W > wall', '0 > wall')
        level = SAMPLE_MAZE_LEVEL.replace('W', '0')
        assert validate(text, level).codes() == [ErrorCode.MAPPING]
        assert validate(text, level, options=ValidatorOptions(level_alphabet=None)).correct

    def test_unparsable_keeps_level_verdict(self):
        report = validate('BasicGame\nSpriteSet\n    wall > Immovable\n', SAMPLE_MAZE_LEVEL)
        assert not report.parsable
        assert report.mappable
        assert report.outcome == Outcome.L
        assert report.to_dict()['logical'] is None

    def test_keyword_error(self):
        report = validate(SAMPLE_MAZE_RULES.replace('BasicGame', 'MazeGame'), SAMPLE_MAZE_LEVEL)
        assert report.codes() == [ErrorCode.KEYWORD]

    def test_every_report_has_an_outcome(self):
        for rules, level in [('', None), ('garbage', 'AG'), (SAMPLE_MAZE_RULES, 'A')]:
            assert validate(rules, level).outcome in set(Outcome)

    def test_to_dict(self):
        data = validate(SAMPLE_MAZE_RULES, 'WWWW\nWAGX\nWWWW').to_dict()
        assert data['outcome'] == 'R'
        assert data['errors'][0]['code'] == 'unmappable.mapping'
        assert data['errors'][0]['family'] == 'Unmappable'


class TestUndefinedTypes:
    """Test cases for sprite types used but never defined"""

    def test_renamed_goal_sprite(self):
        """Test a game whose goal sprite was renamed is not graded correct"""
        rules = SAMPLE_MAZE_RULES.replace('goal    > Immovable', 'exit    > Immovable')
        report = validate(rules, SAMPLE_MAZE_LEVEL)
        assert report.codes() == [ErrorCode.INTERACTION, ErrorCode.TERMINATION, ErrorCode.MAPPING]
        assert report.outcome == Outcome.W
        assert not report.correct

    def test_undefined_interaction_type(self):
        text = maze_with(['avatar wall > stepBack', 'avatar goal > removeSprite', 'avatar ghost > stepBack'])
        report = validate(text, LEVEL)
        assert report.codes() == [ErrorCode.INTERACTION]
        assert 'ghost' in report.errors[0].detail
        assert report.outcome == Outcome.L

    def test_eos_needs_no_definition(self):
        text = maze_with(['avatar wall > stepBack', 'avatar goal > removeSprite', 'avatar EOS > stepBack'])
        assert validate(text, LEVEL).correct

    def test_undefined_counter_type(self):
        text = maze_with(['avatar wall > stepBack', 'avatar goal > removeSprite'],
                         'SpriteCounter stype=goal limit=0 win=True\n        SpriteCounter stype=coin limit=0 win=False')
        errors = check_references(parse_game(text))
        assert [(error.code, error.subject) for error in errors] == [(ErrorCode.TERMINATION, 'coin')]

    def test_unused_mapping_to_undefined_type(self):
        text = maze_with(['avatar wall > stepBack', 'avatar goal > removeSprite'])
        text = text.replace('        G > goal\n', '        G > goal\n        K > key\n')
        report = validate(text, LEVEL)
        assert report.codes() == [ErrorCode.MAPPING]
        assert report.errors[0].subject == 'key'
        assert report.outcome == Outcome.R

    def test_hash_mapping_line(self):
        """Test a '#' mapping line is reported although the parser drops it"""
        text = maze_with(['avatar wall > stepBack', 'avatar goal > removeSprite'])
        text = text.replace('        G > goal\n', '        G > goal\n        # > wall\n')
        report = validate(text, LEVEL)
        assert report.codes() == [ErrorCode.MAPPING]
        assert report.errors[0].location == (10, 9)
        assert report.errors[0].subject == '#'

    def test_plain_comments_are_not_mappings(self):
        text = 'BasicGame\n    LevelMapping\n        # walls first\n        W > wall\n    SpriteSet\n        # > wall\n'
        assert check_comment_mappings(text) == []


class TestRoles:
    """Test cases for role resolution"""

    def test_goal_from_win_counter(self):
        spec = parse_game(maze_with(['avatar wall > stepBack'], 'SpriteCounter stype=goal limit=0 win=True'))
        roles = resolve_roles(spec)
        assert (roles.avatar, roles.wall, roles.goal) == ('avatar', 'wall', 'goal')

    def test_interaction_through_parent_type(self):
        text = (
            'BasicGame\n'
            '    SpriteSet\n'
            '        wall > Immovable\n'
            '        avatar > MovingAvatar\n'
            '        target > Immovable\n'
            '            goal >\n'
            '    InteractionSet\n'
            '        avatar wall > stepBack\n'
            '        target avatar > killSprite\n'
        )
        spec = parse_game(text)
        assert check_interactions(spec, 'avatar', 'wall', 'goal') == []


class TestFixtures:
    """Classification of the bundled representative responses"""

    def test_gpt4_p7_is_correct(self):
        report = fixture_report('gpt-4', 'p7')
        assert report.outcome == Outcome.G

    def test_gpt4_p5_trailing_token(self):
        report = fixture_report('gpt-4', 'p5')
        assert report.codes() == [ErrorCode.SYNTAX]
        assert report.outcome == Outcome.L

    def test_gpt4_p5_strict_order_also_syntax(self):
        options = ValidatorOptions(parser_options=ParserOptions(strict_block_order=True))
        assert fixture_report('gpt-4', 'p5', options).codes() == [ErrorCode.SYNTAX]

    def test_gpt4_p1_removal_target(self):
        report = fixture_report('gpt-4', 'p1')
        assert report.codes() == [ErrorCode.INTERACTION]
        assert 'winGoal' in report.errors[0].detail

    def test_gpt4_p3_kill_direction(self):
        report = fixture_report('gpt-4', 'p3')
        assert report.parsable
        assert report.mappable
        assert report.codes() == [ErrorCode.INTERACTION]
        assert report.outcome == Outcome.L

    def test_gpt35_p1(self):
        report = fixture_report('gpt-3.5', 'p1')
        codes = report.codes()
        assert ErrorCode.COMPONENT in codes
        assert ErrorCode.MAPPING in codes
        assert report.parsable
        assert report.outcome == Outcome.W

    def test_gpt35_p4_hash_rows(self):
        report = fixture_report('gpt-3.5', 'p4')
        assert ErrorCode.MAPPING in report.codes()
        mapping = [error for error in report.errors if error.code == ErrorCode.MAPPING]
        assert mapping[0].subject == '#'

    def test_gpt35_p7_no_goal_interaction(self):
        report = fixture_report('gpt-3.5', 'p7')
        assert report.codes() == [ErrorCode.INTERACTION]
        assert report.outcome == Outcome.L

    @pytest.mark.parametrize('preset_id', ['p1', 'p3', 'p4', 'p5'])
    def test_gemma_unparsable(self, preset_id):
        report = fixture_report('gemma-7b', preset_id)
        assert report.codes() == [ErrorCode.SYNTAX]


class TestLevelAlphabet:
    """Test cases for the level check of unparsable rules"""

    def test_valid_level(self):
        assert level_matches_alphabet(parse_level(SAMPLE_MAZE_LEVEL))

    def test_two_avatars(self):
        assert not level_matches_alphabet(parse_level('WAAGW'))

    def test_foreign_character(self):
        assert not level_matches_alphabet(parse_level('WAGX'))

    def test_missing_level(self):
        assert not level_matches_alphabet(None)


if __name__ == '__main__':
    pytest.main([__file__])
