"""
Rule-based validation of generated VGDL: parsable, logical and mappable
checks, the error taxonomy and the G/R/L/W outcome classes
"""

import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, List, Optional, Tuple

from response_extractor import LevelPlacement
from vgdl_ast import (
    BLOCK_HEADERS,
    CANONICAL_BLOCK_ORDER,
    BlockKind,
    GameSpec,
    LevelGrid,
    ValueKind,
    covering_types,
    resolve_sprite_class,
)
from vgdl_parser import ParseCategory, ParseError, ParserOptions, parse_game, parse_level

logger = logging.getLogger(__name__)

AVATAR_CLASS = 'MovingAvatar'
EOS_TYPE = 'EOS'

# A mapping line for the comment delimiter never reaches the parser
_HASH_MAPPING_RE = re.compile(r'^\s*#\s*>\s*[A-Za-z_]\w*(\s+[A-Za-z_]\w*)*\s*$')


class ErrorFamily(str, Enum):
    UNPARSABLE = 'Unparsable'
    ILLOGICAL = 'Illogical'
    UNMAPPABLE = 'Unmappable'


class ErrorCode(str, Enum):
    KEYWORD = 'unparsable.keyword'
    SYNTAX = 'unparsable.syntax'
    COMPONENT = 'illogical.component'
    INTERACTION = 'illogical.interaction'
    TERMINATION = 'illogical.termination'
    NO_LEVEL = 'unmappable.no_level'
    PLACE = 'unmappable.place'
    MAPPING = 'unmappable.mapping'
    SPRITE = 'unmappable.sprite'

    @property
    def family(self):
        return ErrorFamily(self.value.split('.')[0].capitalize())

    @property
    def label(self):
        return _CODE_LABELS[self]


_CODE_LABELS = {
    ErrorCode.KEYWORD: 'Keyword',
    ErrorCode.SYNTAX: 'Syntax',
    ErrorCode.COMPONENT: 'Component',
    ErrorCode.INTERACTION: 'Interaction',
    ErrorCode.TERMINATION: 'Termination',
    ErrorCode.NO_LEVEL: 'No level',
    ErrorCode.PLACE: 'Place',
    ErrorCode.MAPPING: 'Mapping',
    ErrorCode.SPRITE: 'Sprite',
}


class Outcome(str, Enum):
    G = 'G'
    R = 'R'
    L = 'L'
    W = 'W'

    @classmethod
    def classify(cls, rule_correct, level_correct):
        if rule_correct:
            return cls.G if level_correct else cls.R
        return cls.L if level_correct else cls.W


@dataclass(frozen=True)
class ValidationError:
    code: ErrorCode
    detail: str
    location: Optional[Tuple[int, int]] = None
    subject: Optional[str] = None

    @property
    def family(self):
        return self.code.family

    def to_dict(self):
        return {
            'code': self.code.value,
            'family': self.family.value,
            'detail': self.detail,
            'location': list(self.location) if self.location else None,
        }


@dataclass(frozen=True)
class ValidationReport:
    parsable: bool
    logical: bool
    mappable: bool
    errors: Tuple[ValidationError, ...] = ()
    spec: Optional[GameSpec] = field(default=None, compare=False, repr=False)
    level: Optional[LevelGrid] = field(default=None, compare=False, repr=False)

    @property
    def correct(self):
        return self.parsable and self.logical and self.mappable

    @property
    def rule_correct(self):
        return self.parsable and self.logical

    @property
    def level_correct(self):
        return self.mappable

    @property
    def outcome(self):
        return Outcome.classify(self.rule_correct, self.level_correct)

    def codes(self):
        """Distinct error codes in first-seen order"""
        return list(dict.fromkeys(error.code for error in self.errors))

    def to_dict(self):
        return {
            'parsable': self.parsable,
            'logical': self.logical if self.parsable else None,
            'mappable': self.mappable,
            'correct': self.correct,
            'outcome': self.outcome.value,
            'errors': [error.to_dict() for error in self.errors],
        }


@dataclass(frozen=True)
class Roles:
    avatar: Optional[str]
    wall: Optional[str]
    goal: Optional[str]


@dataclass(frozen=True)
class ValidatorOptions:
    """Validator configuration"""

    background_chars: FrozenSet[str] = frozenset({' ', '.'})
    level_alphabet: Optional[FrozenSet[str]] = frozenset({'W', 'A', 'G'})
    wall_char: str = 'W'
    avatar_char: str = 'A'
    goal_char: str = 'G'
    parser_options: ParserOptions = field(default_factory=ParserOptions)

    @property
    def padding_char(self):
        return ' ' if ' ' in self.background_chars else sorted(self.background_chars)[0]


@dataclass(frozen=True)
class SpriteCounterRule:
    stype: str
    limit: int
    win: bool


def _covers(spec, rule_type, stype):
    """True when a rule naming rule_type applies to sprites of stype"""
    return stype in covering_types(spec, rule_type)


def removal_target(interaction):
    """Type removed by an interaction: first position for killSprite, second for removeSprite"""
    if interaction.method == 'killSprite':
        return interaction.subject
    if interaction.method == 'removeSprite':
        return interaction.object
    return None


def sprite_counter_rule(termination):
    """
    Read the options of a SpriteCounter

    Args:
        termination (TerminationDef): A SpriteCounter termination

    Returns:
        tuple: (SpriteCounterRule or None, list of problem descriptions)
    """
    problems = []
    stype = termination.option('stype')
    limit = termination.option('limit')
    win = termination.option('win')

    if stype is None:
        problems.append('missing stype')
    elif stype.kind is not ValueKind.IDENTIFIER:
        problems.append(f"stype '{stype.raw}' is not a sprite type")
    if limit is None:
        problems.append('missing limit')
    elif limit.kind is not ValueKind.INTEGER or limit.as_int() < 0:
        problems.append(f"limit '{limit.raw}' is not a non-negative integer")
    if win is None:
        problems.append('missing win')
    elif win.kind is not ValueKind.BOOLEAN:
        problems.append(f"win '{win.raw}' is not True/False")

    if problems:
        return None, problems
    return SpriteCounterRule(stype.raw, limit.as_int(), win.as_bool()), []


def _win_flag(termination):
    win = termination.option('win')
    return win is not None and win.kind is ValueKind.BOOLEAN and win.as_bool()


def resolve_roles(spec, options=None):
    """
    Decide which sprite types play avatar, wall and goal

    Args:
        spec (GameSpec): Parsed game
        options (ValidatorOptions): Role characters

    Returns:
        Roles: Any role may be None; the checks report the consequence
    """
    options = options or ValidatorOptions()
    defined = spec.defined_types()

    avatar = next(
        (stype for stype in defined if resolve_sprite_class(spec, stype) == AVATAR_CLASS),
        None,
    )

    wall_map = spec.char_map(options.wall_char)
    if wall_map is not None:
        wall = wall_map.stypes[0]
    else:
        wall = 'wall' if 'wall' in defined else None

    avatar_types = covering_types(spec, avatar) if avatar else frozenset()
    goal = None
    for termination in spec.termination_set:
        if termination.termination_class != 'SpriteCounter' or not _win_flag(termination):
            continue
        stype = termination.option('stype')
        if stype is not None and stype.kind is ValueKind.IDENTIFIER and stype.raw not in avatar_types:
            goal = stype.raw
            break
    if goal is None and 'goal' in defined:
        goal = 'goal'

    return Roles(avatar, wall, goal)


def check_components(spec):
    """Missing blocks, no controllable avatar, root sprites without a class"""
    errors = []
    for kind in CANONICAL_BLOCK_ORDER:
        if not spec.has_block(kind):
            errors.append(ValidationError(ErrorCode.COMPONENT, f'missing {kind.value}'))

    if not any(resolve_sprite_class(spec, stype) == AVATAR_CLASS for stype in spec.defined_types()):
        errors.append(ValidationError(ErrorCode.COMPONENT, f'no sprite of class {AVATAR_CLASS}'))

    for sprite in spec.sprite_set:
        if not sprite.sprite_class:
            errors.append(ValidationError(
                ErrorCode.COMPONENT,
                f"root sprite '{sprite.stype}' has no sprite class",
                subject=sprite.stype,
            ))
    return errors


def check_interactions(spec, avatar_type, wall_type, goal_type):
    """
    Check the avatar-wall and avatar-goal interaction sentences

    Args:
        spec (GameSpec): Parsed game
        avatar_type (str): Avatar role; None skips the check
        wall_type (str): Wall role or None
        goal_type (str): Goal role or None

    Returns:
        list: Interaction errors
    """
    if avatar_type is None:
        return []
    errors = []
    interactions = spec.interaction_set

    blocks_avatar = wall_type is not None and any(
        rule.method == 'stepBack'
        and _covers(spec, rule.subject, avatar_type)
        and _covers(spec, rule.object, wall_type)
        for rule in interactions
    )
    if not blocks_avatar:
        errors.append(ValidationError(
            ErrorCode.INTERACTION,
            f"no '{avatar_type} {wall_type or 'wall'} > stepBack' interaction",
            subject=wall_type,
        ))

    goal_rules = [] if goal_type is None else [
        rule for rule in interactions
        if (_covers(spec, rule.subject, avatar_type) and _covers(spec, rule.object, goal_type))
        or (_covers(spec, rule.subject, goal_type) and _covers(spec, rule.object, avatar_type))
    ]
    if not goal_rules:
        errors.append(ValidationError(
            ErrorCode.INTERACTION,
            f"no interaction between '{avatar_type}' and '{goal_type or 'goal'}'",
            subject=goal_type,
        ))
    elif not any(
        removal_target(rule) is not None and _covers(spec, removal_target(rule), goal_type)
        for rule in goal_rules
    ):
        sentences = '; '.join(rule.sentence() for rule in goal_rules)
        errors.append(ValidationError(
            ErrorCode.INTERACTION,
            f"removal target is not '{goal_type}' in: {sentences}",
            subject=goal_type,
        ))
    return errors


def check_references(spec, exempt_types=frozenset()):
    """
    Report interactions and SpriteCounters naming types the SpriteSet never defines

    Args:
        spec (GameSpec): Parsed game
        exempt_types (frozenset): Counter types already explained by an interaction error

    Returns:
        list: Interaction and termination errors
    """
    defined = set(spec.defined_types())
    errors = []
    for rule in spec.interaction_set:
        for stype in dict.fromkeys((rule.subject, rule.object)):
            if stype != EOS_TYPE and stype not in defined:
                errors.append(ValidationError(
                    ErrorCode.INTERACTION,
                    f"'{stype}' is not defined in the SpriteSet: {rule.sentence()}",
                    subject=stype,
                ))

    for termination in spec.termination_set:
        if termination.termination_class != 'SpriteCounter':
            continue
        stype = termination.option('stype')
        if stype is None or stype.kind is not ValueKind.IDENTIFIER:
            continue
        if stype.raw not in defined and stype.raw not in exempt_types:
            errors.append(ValidationError(
                ErrorCode.TERMINATION,
                f"SpriteCounter stype '{stype.raw}' is not defined in the SpriteSet",
                subject=stype.raw,
            ))
    return errors


def instance_counts(spec, level):
    """Instances per sprite type spawned by the level's mapped characters"""
    counts = Counter()
    mapping = spec.mapped_chars()
    for _, _, ch in level.cells():
        for stype in mapping.get(ch, ()):
            counts[stype] += 1
    return counts


def _count_covered(spec, counts, rule_type):
    covered = covering_types(spec, rule_type)
    return sum(count for stype, count in counts.items() if stype in covered)


def check_termination(spec, level=None, exempt_types=frozenset()):
    """
    Check that a win exists, nothing ends the game at once, and wins are reachable

    Args:
        spec (GameSpec): Parsed game
        level (LevelGrid): Level to count initial sprites on; None skips that check
        exempt_types (frozenset): Counted types whose reachability problem is
            already explained by an interaction error

    Returns:
        list: Termination errors
    """
    errors = []
    counters = []
    for termination in spec.termination_set:
        if termination.termination_class != 'SpriteCounter':
            continue
        rule, problems = sprite_counter_rule(termination)
        for problem in problems:
            errors.append(ValidationError(ErrorCode.TERMINATION, f'SpriteCounter {problem}'))
        if rule is not None:
            counters.append(rule)

    if not any(_win_flag(termination) for termination in spec.termination_set):
        errors.append(ValidationError(ErrorCode.TERMINATION, 'no termination with win=True'))

    if level is not None:
        counts = instance_counts(spec, level)
        for rule in counters:
            count = _count_covered(spec, counts, rule.stype)
            if count <= rule.limit:
                errors.append(ValidationError(
                    ErrorCode.TERMINATION,
                    f'SpriteCounter stype={rule.stype} limit={rule.limit} holds at start ({count} present)',
                    subject=rule.stype,
                ))

    targets = [removal_target(rule) for rule in spec.interaction_set]
    removable = set()
    for target in targets:
        if target is not None:
            removable |= covering_types(spec, target)
    for rule in counters:
        if not rule.win or rule.stype in exempt_types:
            continue
        if not covering_types(spec, rule.stype) & removable:
            errors.append(ValidationError(
                ErrorCode.TERMINATION,
                f"win counter on '{rule.stype}' can never change: no interaction removes it",
                subject=rule.stype,
            ))
    return errors


def _first_cell(level, ch):
    for x, y, cell in level.cells():
        if cell == ch:
            return x, y
    return None


def _role_type(spec, role, ch, fallback):
    if role is not None:
        return role
    mapped = spec.char_map(ch)
    return mapped.stypes[0] if mapped is not None else fallback


def check_mappable(spec, level, placement=LevelPlacement.SEPARATE, options=None, exempt_types=frozenset()):
    """
    Check that the level exists, sits apart from the rules and maps onto sprites

    Args:
        spec (GameSpec): Parsed game
        level (LevelGrid): Level or None
        placement (LevelPlacement): Where the level was found
        options (ValidatorOptions): Background, alphabet and role characters
        exempt_types (frozenset): Undefined types already explained by an interaction error

    Returns:
        list: Unmappable errors
    """
    options = options or ValidatorOptions()
    if level is None:
        return [ValidationError(ErrorCode.NO_LEVEL, 'no level found')]

    errors = []
    if placement is LevelPlacement.INLINE:
        errors.append(ValidationError(ErrorCode.PLACE, 'level is embedded inside the game description'))

    defined = set(spec.defined_types())
    for char_map in spec.level_mapping:
        for stype in char_map.stypes:
            if stype not in defined and stype not in exempt_types:
                errors.append(ValidationError(
                    ErrorCode.MAPPING,
                    f"'{char_map.ch} > {stype}' maps to a type the SpriteSet never defines",
                    subject=stype,
                ))

    mapping = spec.mapped_chars()
    for ch in sorted(level.chars(), key=lambda c: _first_cell(level, c)[::-1]):
        location = _first_cell(level, ch)
        if ch == '#':
            errors.append(ValidationError(ErrorCode.MAPPING, "'#' is prohibited in levels", location, ch))
        elif ch not in mapping:
            if ch not in options.background_chars:
                errors.append(ValidationError(ErrorCode.MAPPING, f"'{ch}' has no level mapping", location, ch))
        elif (
            options.level_alphabet is not None
            and ch not in options.level_alphabet
            and ch not in options.background_chars
        ):
            errors.append(ValidationError(
                ErrorCode.MAPPING, f"'{ch}' is outside the level alphabet", location, ch,
            ))

    roles = resolve_roles(spec, options)
    counts = instance_counts(spec, level)
    avatar_type = _role_type(spec, roles.avatar, options.avatar_char, 'avatar')
    goal_type = _role_type(spec, roles.goal, options.goal_char, 'goal')

    avatars = _count_covered(spec, counts, avatar_type)
    if avatars == 0:
        errors.append(ValidationError(ErrorCode.SPRITE, f"no '{avatar_type}' in level", subject=avatar_type))
    elif avatars > 1:
        errors.append(ValidationError(
            ErrorCode.SPRITE, f"{avatars} '{avatar_type}' instances in level", subject=avatar_type,
        ))
    if _count_covered(spec, counts, goal_type) == 0:
        errors.append(ValidationError(ErrorCode.SPRITE, f"no '{goal_type}' in level", subject=goal_type))
    return errors


def check_comment_mappings(rules_text):
    """'#' mapping lines inside LevelMapping, which the parser drops as comments"""
    errors = []
    in_mapping = False
    for lineno, line in enumerate(rules_text.split('\n'), start=1):
        words = line.split()
        if words and words[0] in BLOCK_HEADERS:
            in_mapping = words[0] == BlockKind.LEVEL_MAPPING.value
        elif in_mapping and _HASH_MAPPING_RE.match(line):
            errors.append(ValidationError(
                ErrorCode.MAPPING,
                f"'#' starts a comment and cannot be mapped: {line.strip()}",
                (lineno, line.index('#') + 1),
                '#',
            ))
    return errors


def level_matches_alphabet(level, options=None):
    """
    Level check used when the rules cannot be parsed

    Args:
        level (LevelGrid): Level or None
        options (ValidatorOptions): Alphabet, background and role characters

    Returns:
        bool: Only alphabet and background characters, one avatar, at least one goal
    """
    options = options or ValidatorOptions()
    if level is None:
        return False
    alphabet = options.level_alphabet or frozenset({options.wall_char, options.avatar_char, options.goal_char})
    allowed = alphabet | options.background_chars
    text = ''.join(level.rows)
    if any(ch not in allowed for ch in text):
        return False
    return text.count(options.avatar_char) == 1 and text.count(options.goal_char) >= 1


def _parse_error(error):
    code = ErrorCode.KEYWORD if error.category is ParseCategory.KEYWORD else ErrorCode.SYNTAX
    return ValidationError(code, error.message, (error.line, error.col))


def _load_level(level_text, options):
    if level_text is None:
        return None
    try:
        return parse_level(level_text, options.padding_char)
    except ParseError:
        return None


def validate(rules_text, level_text=None, placement=None, options=None):
    """
    Validate a rules text and its level

    Args:
        rules_text (str): Game description text
        level_text (str): Level text or None
        placement (LevelPlacement): Where the level was found; SEPARATE if None
        options (ValidatorOptions): Validator configuration

    Returns:
        ValidationReport: Verdicts, errors and outcome
    """
    options = options or ValidatorOptions()
    level = _load_level(level_text, options)
    if placement is None:
        placement = LevelPlacement.SEPARATE if level is not None else LevelPlacement.MISSING

    try:
        spec = parse_game(rules_text, options.parser_options)
    except ParseError as e:
        logger.debug(f'Rules unparsable: {e}')
        return ValidationReport(
            parsable=False,
            logical=False,
            mappable=level_matches_alphabet(level, options),
            errors=(_parse_error(e),),
            level=level,
        )

    roles = resolve_roles(spec, options)
    logical_errors: List[ValidationError] = []
    logical_errors.extend(check_components(spec))
    interaction_errors = check_interactions(spec, roles.avatar, roles.wall, roles.goal)
    logical_errors.extend(interaction_errors)

    exempt = frozenset()
    if roles.goal is not None and any(error.subject == roles.goal for error in interaction_errors):
        exempt = covering_types(spec, roles.goal)
    logical_errors.extend(check_termination(spec, level, exempt))
    logical_errors.extend(check_references(spec, exempt))

    mapping_errors = check_comment_mappings(rules_text)
    mapping_errors.extend(check_mappable(spec, level, placement, options, exempt))

    return ValidationReport(
        parsable=True,
        logical=not logical_errors,
        mappable=not mapping_errors,
        errors=tuple(logical_errors + mapping_errors),
        spec=spec,
        level=level,
    )


def validate_candidate(candidate, options=None):
    """validate() over an extracted Candidate"""
    return validate(candidate.rules_text, candidate.level_text, candidate.placement, options)
