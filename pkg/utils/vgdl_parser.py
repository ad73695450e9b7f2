"""
Recursive-descent parser for VGDL game descriptions and level grids
"""

import logging
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional

from vgdl_ast import (
    BLOCK_HEADERS,
    CANONICAL_BLOCK_ORDER,
    BlockKind,
    CharMap,
    GameSpec,
    InteractionDef,
    LevelGrid,
    Option,
    OptionValue,
    SpriteDef,
    TerminationDef,
)
from vgdl_lexer import (
    DEFAULT_TAB_WIDTH,
    WORD_KINDS,
    ParseCategory,
    ParseError,
    TokenKind,
    tokenize,
)

logger = logging.getLogger(__name__)

__all__ = [
    'ParseCategory',
    'ParseError',
    'ParserOptions',
    'parse_game',
    'parse_level',
    'pretty_print',
]

# GVGAI ontology names, checked only in strict ontology mode
SPRITE_CLASSES = frozenset({
    'Immovable', 'Immutable', 'Passive', 'Resource', 'ResourcePack', 'Missile',
    'RandomNPC', 'Chaser', 'AStarChaser', 'Fleeing', 'Flicker', 'OrientedFlicker',
    'SpawnPoint', 'Bomber', 'Walker', 'Portal', 'Conveyor', 'ErraticMissile',
    'RandomInertial', 'RandomMissile', 'Spreader', 'Door', 'Key',
    'MovingAvatar', 'FlakAvatar', 'ShootAvatar', 'HorizontalAvatar',
    'VerticalAvatar', 'OrientedAvatar', 'RotatingAvatar', 'RotatingFlippingAvatar',
    'NoisyRotatingFlippingAvatar', 'ShootEverywhereAvatar', 'AimedAvatar',
    'AimedFlakAvatar', 'InertialAvatar', 'MarioAvatar', 'WalkJumper',
})

INTERACTION_METHODS = frozenset({
    'killSprite', 'killBoth', 'stepBack', 'removeSprite', 'transformTo',
    'turnAround', 'reverseDirection', 'changeResource', 'collectResource',
    'killIfHasLess', 'killIfHasMore', 'killIfOtherHasMore', 'killIfOtherHasLess',
    'killIfFromAbove', 'wrapAround', 'bounceForward', 'undoAll', 'teleportToExit',
    'pullWithIt', 'wallStop', 'wallBounce', 'bounceDirection', 'flipDirection',
    'killIfAlive', 'killIfSlow', 'conveySprite', 'cloneSprite', 'spawnIfHasMore',
    'windGust', 'slipForward', 'attractGaze', 'scoreChange',
})

TERMINATION_CLASSES = frozenset({
    'SpriteCounter', 'MultiSpriteCounter', 'Timeout', 'StopCounter',
})


@dataclass(frozen=True)
class ParserOptions:
    """Parser configuration"""

    tab_width: int = DEFAULT_TAB_WIDTH
    known_game_classes: FrozenSet[str] = field(default_factory=lambda: frozenset({'BasicGame'}))
    strict_block_order: bool = False
    strict_ontology: bool = False


class _GameParser:
    """Single-use parser over one token stream"""

    def __init__(self, tokens, options):
        self.tokens = tokens
        self.options = options
        self.pos = 0
        # First Keyword problem; only raised if no Syntax problem follows
        self.pending_keyword: Optional[ParseError] = None

    # token helpers

    def peek(self, offset=0):
        index = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[index]

    def advance(self):
        token = self.peek()
        if token.kind is not TokenKind.EOF:
            self.pos += 1
        return token

    def expect(self, kind, what):
        token = self.peek()
        if token.kind is not kind:
            raise ParseError.syntax(f'Expected {what}, found {token}', token.line, token.col)
        return self.advance()

    def expect_identifier(self, what):
        return self.expect(TokenKind.IDENTIFIER, what)

    def note_keyword(self, token, message):
        if self.pending_keyword is None:
            self.pending_keyword = ParseError.keyword(message, token.line, token.col)

    def check_ontology(self, token, names, what):
        if self.options.strict_ontology and token.text not in names:
            self.note_keyword(token, f"Unknown {what} '{token.text}'")

    # grammar

    def parse(self):
        first = self.peek()
        if first.kind is TokenKind.EOF:
            raise ParseError.syntax('Empty game description', first.line, first.col)

        game_class = self.expect_identifier('game class')
        if game_class.text not in self.options.known_game_classes:
            self.note_keyword(game_class, f"Unknown game class '{game_class.text}'")
        self.expect(TokenKind.NEWLINE, 'end of line after game class')
        self.expect(TokenKind.INDENT, 'indented block list')

        blocks = {}
        order: List[BlockKind] = []
        while self.peek().kind not in (TokenKind.DEDENT, TokenKind.EOF):
            self.parse_block(blocks, order)

        self.expect(TokenKind.DEDENT, 'end of game description')
        self.expect(TokenKind.EOF, 'end of input')

        if self.pending_keyword is not None:
            raise self.pending_keyword

        return GameSpec(
            game_class=game_class.text,
            sprite_set=blocks.get(BlockKind.SPRITE_SET, ()),
            level_mapping=blocks.get(BlockKind.LEVEL_MAPPING, ()),
            interaction_set=blocks.get(BlockKind.INTERACTION_SET, ()),
            termination_set=blocks.get(BlockKind.TERMINATION_SET, ()),
            block_order=tuple(order),
        )

    def parse_block(self, blocks, order):
        header = self.peek()
        if header.kind not in WORD_KINDS:
            raise ParseError.syntax(f'Expected block header, found {header}', header.line, header.col)
        self.advance()
        self.expect(TokenKind.NEWLINE, f"end of line after '{header.text}'")

        if header.text not in BLOCK_HEADERS:
            self.note_keyword(header, f"Unknown block header '{header.text}'")
            self.skip_body()
            return

        kind = BlockKind(header.text)
        if kind in order:
            raise ParseError.syntax(f"Duplicate block '{kind.value}'", header.line, header.col)
        if self.options.strict_block_order and order:
            if CANONICAL_BLOCK_ORDER.index(kind) < CANONICAL_BLOCK_ORDER.index(order[-1]):
                raise ParseError.syntax(
                    f"Block '{kind.value}' out of order after '{order[-1].value}'",
                    header.line, header.col,
                )
        order.append(kind)

        if self.peek().kind is not TokenKind.INDENT:
            blocks[kind] = ()
            return
        self.advance()

        if kind is BlockKind.SPRITE_SET:
            blocks[kind] = self.parse_sprites(set())
        elif kind is BlockKind.LEVEL_MAPPING:
            blocks[kind] = self.parse_char_maps()
        elif kind is BlockKind.INTERACTION_SET:
            blocks[kind] = self.parse_interactions()
        else:
            blocks[kind] = self.parse_terminations()
        self.expect(TokenKind.DEDENT, f'end of {kind.value}')

    def skip_body(self):
        if self.peek().kind is not TokenKind.INDENT:
            return
        depth = 0
        while True:
            token = self.advance()
            if token.kind is TokenKind.INDENT:
                depth += 1
            elif token.kind is TokenKind.DEDENT:
                depth -= 1
                if depth == 0:
                    return
            elif token.kind is TokenKind.EOF:
                return

    def parse_options(self):
        options = []
        seen = set()
        while self.peek().kind is not TokenKind.NEWLINE:
            key = self.peek()
            if key.kind is not TokenKind.IDENTIFIER or self.peek(1).kind is not TokenKind.EQUALS:
                raise ParseError.syntax(
                    f'Expected key=value option, found {key}', key.line, key.col
                )
            self.advance()
            self.advance()
            value = self.peek()
            if value.kind not in WORD_KINDS:
                raise ParseError.syntax(
                    f"Missing value for option '{key.text}'", value.line, value.col
                )
            self.advance()
            if key.text in seen:
                raise ParseError.syntax(f"Duplicate option '{key.text}'", key.line, key.col)
            seen.add(key.text)
            options.append(Option(key.text, OptionValue.of(value.text)))
        return tuple(options)

    def parse_sprites(self, seen_types):
        sprites = []
        while self.peek().kind not in (TokenKind.DEDENT, TokenKind.EOF):
            stype = self.expect_identifier('sprite type')
            if stype.text in seen_types:
                raise ParseError.syntax(
                    f"Sprite type '{stype.text}' defined twice", stype.line, stype.col
                )
            seen_types.add(stype.text)
            self.expect(TokenKind.GT, f"'>' after sprite type '{stype.text}'")

            sprite_class = None
            if self.peek().kind is TokenKind.IDENTIFIER and self.peek(1).kind is not TokenKind.EQUALS:
                class_token = self.advance()
                self.check_ontology(class_token, SPRITE_CLASSES, 'sprite class')
                sprite_class = class_token.text

            options = self.parse_options()
            self.expect(TokenKind.NEWLINE, 'end of sprite definition')

            children = ()
            if self.peek().kind is TokenKind.INDENT:
                self.advance()
                children = self.parse_sprites(seen_types)
                self.expect(TokenKind.DEDENT, f"end of children of '{stype.text}'")

            sprites.append(SpriteDef(stype.text, sprite_class, options, children))
        return tuple(sprites)

    def parse_char_maps(self):
        mappings = []
        seen_chars = set()
        while self.peek().kind not in (TokenKind.DEDENT, TokenKind.EOF):
            key = self.peek()
            if key.kind not in WORD_KINDS or len(key.text) != 1:
                raise ParseError.syntax(
                    f'Level mapping key must be a single character, found {key}',
                    key.line, key.col,
                )
            self.advance()
            if key.text in seen_chars:
                raise ParseError.syntax(f"Character '{key.text}' mapped twice", key.line, key.col)
            seen_chars.add(key.text)
            self.expect(TokenKind.GT, f"'>' after '{key.text}'")

            stypes = [self.expect_identifier('sprite type').text]
            while self.peek().kind is not TokenKind.NEWLINE:
                stypes.append(self.expect_identifier('sprite type').text)
            self.advance()
            mappings.append(CharMap(key.text, tuple(stypes)))
        return tuple(mappings)

    def parse_interactions(self):
        interactions = []
        while self.peek().kind not in (TokenKind.DEDENT, TokenKind.EOF):
            subject = self.expect_identifier('sprite type')
            obj = self.expect_identifier('second sprite type')
            self.expect(TokenKind.GT, "'>' in interaction")
            method = self.expect_identifier('interaction method')
            self.check_ontology(method, INTERACTION_METHODS, 'interaction method')
            options = self.parse_options()
            self.expect(TokenKind.NEWLINE, 'end of interaction')
            interactions.append(InteractionDef(subject.text, obj.text, method.text, options))
        return tuple(interactions)

    def parse_terminations(self):
        terminations = []
        while self.peek().kind not in (TokenKind.DEDENT, TokenKind.EOF):
            termination_class = self.expect_identifier('termination class')
            self.check_ontology(termination_class, TERMINATION_CLASSES, 'termination class')
            options = self.parse_options()
            self.expect(TokenKind.NEWLINE, 'end of termination')
            terminations.append(TerminationDef(termination_class.text, options))
        return tuple(terminations)


def parse_game(text, options=None):
    """
    Parse a VGDL game description

    Args:
        text (str): Game description source
        options (ParserOptions): Parser configuration, defaults if None

    Returns:
        GameSpec: Parsed game

    Raises:
        ParseError: Exactly one error, the first Syntax problem or else the
            first Keyword problem
    """
    options = options or ParserOptions()
    tokens = tokenize(text, options.tab_width)
    spec = _GameParser(tokens, options).parse()
    logger.debug(
        f'Parsed {spec.game_class}: {len(spec.defined_types())} sprites, '
        f'{len(spec.level_mapping)} mappings, {len(spec.interaction_set)} interactions'
    )
    return spec


def parse_level(text, background_char=' '):
    """
    Parse level text into a rectangular grid

    Args:
        text (str): Level rows separated by newlines
        background_char (str): Padding character for short rows

    Returns:
        LevelGrid: Grid with every row padded to the widest row

    Raises:
        ParseError: If no rows remain after trimming blank lines
    """
    rows = [line.rstrip('\r') for line in text.split('\n')]
    while rows and not rows[0].strip():
        rows.pop(0)
    while rows and not rows[-1].strip():
        rows.pop()
    if not rows:
        raise ParseError.syntax('Empty level', 1, 1)

    width = max(len(row) for row in rows)
    padded = tuple(row.ljust(width, background_char) for row in rows)
    return LevelGrid(rows=padded, width=width, height=len(padded))


def _render_options(options):
    return ''.join(f' {option.render()}' for option in options)


def _render_sprite(sprite, depth, lines):
    head = f'{sprite.stype} >'
    if sprite.sprite_class:
        head += f' {sprite.sprite_class}'
    lines.append('    ' * depth + head + _render_options(sprite.options))
    for child in sprite.children:
        _render_sprite(child, depth + 1, lines)


def pretty_print(spec):
    """
    Render a GameSpec as VGDL text in canonical block order

    Args:
        spec (GameSpec): Game to render

    Returns:
        str: Source text that parses back to an equal GameSpec
    """
    lines = [spec.game_class]
    present = set(spec.block_order)
    for kind in CANONICAL_BLOCK_ORDER:
        if kind not in present:
            continue
        lines.append(f'    {kind.value}')
        if kind is BlockKind.LEVEL_MAPPING:
            for mapping in spec.level_mapping:
                lines.append(f"        {mapping.ch} > {' '.join(mapping.stypes)}")
        elif kind is BlockKind.SPRITE_SET:
            for sprite in spec.sprite_set:
                _render_sprite(sprite, 2, lines)
        elif kind is BlockKind.INTERACTION_SET:
            for interaction in spec.interaction_set:
                lines.append(f'        {interaction.sentence()}{_render_options(interaction.options)}')
        else:
            for termination in spec.termination_set:
                lines.append(f'        {termination.termination_class}{_render_options(termination.options)}')
    return '\n'.join(lines) + '\n'
