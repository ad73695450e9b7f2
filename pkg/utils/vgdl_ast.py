"""
VGDL abstract syntax tree: game descriptions, levels and the helpers that
walk the sprite hierarchy.
"""

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

logger = logging.getLogger(__name__)


class VGDLError(Exception):
    """Base class for VGDL domain errors"""


class UndefinedSpriteType(VGDLError):
    """Raised when a sprite type is not defined in the SpriteSet"""

    def __init__(self, stype):
        super().__init__(f"Sprite type '{stype}' is not defined in the SpriteSet")
        self.stype = stype


class BlockKind(str, Enum):
    LEVEL_MAPPING = 'LevelMapping'
    SPRITE_SET = 'SpriteSet'
    INTERACTION_SET = 'InteractionSet'
    TERMINATION_SET = 'TerminationSet'


# Order of the blocks in the grammar; also the pretty-print order
CANONICAL_BLOCK_ORDER = (
    BlockKind.LEVEL_MAPPING,
    BlockKind.SPRITE_SET,
    BlockKind.INTERACTION_SET,
    BlockKind.TERMINATION_SET,
)

BLOCK_HEADERS = frozenset(kind.value for kind in BlockKind)

# Sprite types the grammar names explicitly
BUILTIN_SPRITE_TYPES = frozenset({'avatar', 'wall', 'EOS'})


class ValueKind(str, Enum):
    INTEGER = 'integer'
    FLOAT = 'float'
    BOOLEAN = 'boolean'
    IDENTIFIER = 'identifier'
    STRING = 'string'


_INTEGER_RE = re.compile(r'^[+-]?\d+$')
_FLOAT_RE = re.compile(r'^[+-]?(\d+\.\d*|\.\d+|\d+\.?\d*[eE][+-]?\d+)$')
_IDENTIFIER_RE = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')


def infer_kind(raw):
    """
    Infer the literal kind of a raw option value

    Args:
        raw (str): Option value exactly as written

    Returns:
        ValueKind: Inferred kind
    """
    if _INTEGER_RE.match(raw):
        return ValueKind.INTEGER
    if _FLOAT_RE.match(raw):
        return ValueKind.FLOAT
    if raw in ('True', 'False', 'true', 'false'):
        return ValueKind.BOOLEAN
    if _IDENTIFIER_RE.match(raw):
        return ValueKind.IDENTIFIER
    return ValueKind.STRING


@dataclass(frozen=True)
class OptionValue:
    """Raw option literal tagged with its inferred kind; consumers coerce on use"""

    raw: str
    kind: ValueKind

    @classmethod
    def of(cls, raw):
        return cls(raw=raw, kind=infer_kind(raw))

    def as_int(self):
        if self.kind is not ValueKind.INTEGER:
            raise ValueError(f"'{self.raw}' is not an integer")
        return int(self.raw)

    def as_float(self):
        if self.kind not in (ValueKind.INTEGER, ValueKind.FLOAT):
            raise ValueError(f"'{self.raw}' is not a number")
        return float(self.raw)

    def as_bool(self):
        if self.kind is not ValueKind.BOOLEAN:
            raise ValueError(f"'{self.raw}' is not a boolean")
        return self.raw.lower() == 'true'


@dataclass(frozen=True)
class Option:
    key: str
    value: OptionValue

    def render(self):
        return f'{self.key}={self.value.raw}'


def _find_option(options, key):
    for option in options:
        if option.key == key:
            return option.value
    return None


@dataclass(frozen=True)
class SpriteDef:
    """One node of the SpriteSet tree"""

    stype: str
    sprite_class: Optional[str] = None
    options: Tuple[Option, ...] = ()
    children: Tuple['SpriteDef', ...] = ()

    def option(self, key):
        return _find_option(self.options, key)


@dataclass(frozen=True)
class CharMap:
    ch: str
    stypes: Tuple[str, ...]

    def __post_init__(self):
        if len(self.ch) != 1:
            raise ValueError(f"Level mapping key must be one character, got '{self.ch}'")
        if self.ch == '#':
            raise ValueError("'#' is the comment delimiter and cannot be mapped")
        if not self.stypes:
            raise ValueError(f"Level mapping for '{self.ch}' has no sprite types")


@dataclass(frozen=True)
class InteractionDef:
    subject: str
    object: str
    method: str
    options: Tuple[Option, ...] = ()

    def option(self, key):
        return _find_option(self.options, key)

    def sentence(self):
        return f'{self.subject} {self.object} > {self.method}'


@dataclass(frozen=True)
class TerminationDef:
    termination_class: str
    options: Tuple[Option, ...] = ()

    def option(self, key):
        return _find_option(self.options, key)


@dataclass(frozen=True)
class GameSpec:
    """
    Parsed VGDL game description.

    block_order records which blocks appeared and in what order; it takes no
    part in structural equality so a pretty-printed spec compares equal to
    its source.
    """

    game_class: str
    sprite_set: Tuple[SpriteDef, ...] = ()
    level_mapping: Tuple[CharMap, ...] = ()
    interaction_set: Tuple[InteractionDef, ...] = ()
    termination_set: Tuple[TerminationDef, ...] = ()
    block_order: Tuple[BlockKind, ...] = field(default=(), compare=False)

    def has_block(self, kind):
        return kind in self.block_order

    def iter_sprites(self) -> Iterator[Tuple[SpriteDef, Optional[SpriteDef]]]:
        """Yield (sprite, parent) pairs depth-first in declaration order"""
        stack: List[Tuple[SpriteDef, Optional[SpriteDef]]] = [
            (sprite, None) for sprite in reversed(self.sprite_set)
        ]
        while stack:
            sprite, parent = stack.pop()
            yield sprite, parent
            for child in reversed(sprite.children):
                stack.append((child, sprite))

    def find_sprite(self, stype):
        for sprite, _ in self.iter_sprites():
            if sprite.stype == stype:
                return sprite
        return None

    def defined_types(self):
        return [sprite.stype for sprite, _ in self.iter_sprites()]

    def char_map(self, ch):
        for mapping in self.level_mapping:
            if mapping.ch == ch:
                return mapping
        return None

    def mapped_chars(self):
        return {mapping.ch: mapping.stypes for mapping in self.level_mapping}


@dataclass(frozen=True)
class LevelGrid:
    rows: Tuple[str, ...]
    width: int
    height: int

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ValueError('A level needs at least one row and one column')
        if any(len(row) != self.width for row in self.rows):
            raise ValueError('Level rows must all have the level width')

    def char_at(self, x, y):
        return self.rows[y][x]

    def cells(self) -> Iterator[Tuple[int, int, str]]:
        """Yield (x, y, char) in reading order"""
        for y, row in enumerate(self.rows):
            for x, ch in enumerate(row):
                yield x, y, ch

    def chars(self):
        return {ch for row in self.rows for ch in row}

    def text(self):
        return '\n'.join(self.rows)


def _parent_links(spec) -> Dict[str, Tuple[SpriteDef, Optional[SpriteDef]]]:
    return {sprite.stype: (sprite, parent) for sprite, parent in spec.iter_sprites()}


def resolve_sprite_class(spec, stype):
    """
    Resolve the sprite class of a type, inheriting from its ancestors

    Args:
        spec (GameSpec): Parsed game
        stype (str): Sprite type name

    Returns:
        str or None: Nearest class on the path to the root, None if undefined
    """
    links = _parent_links(spec)
    current = stype
    while current is not None and current in links:
        sprite, parent = links[current]
        if sprite.sprite_class:
            return sprite.sprite_class
        current = parent.stype if parent is not None else None
    return None


def descendant_types(spec, stype) -> FrozenSet[str]:
    """
    Collect a sprite type and all of its transitive children

    Args:
        spec (GameSpec): Parsed game
        stype (str): Sprite type name

    Returns:
        frozenset: stype plus every descendant type

    Raises:
        UndefinedSpriteType: If stype is not in the SpriteSet
    """
    root = spec.find_sprite(stype)
    if root is None:
        raise UndefinedSpriteType(stype)

    found = set()
    pending = [root]
    while pending:
        sprite = pending.pop()
        found.add(sprite.stype)
        pending.extend(sprite.children)
    return frozenset(found)


def covering_types(spec, stype) -> FrozenSet[str]:
    """descendant_types that treats an undefined type as covering only itself"""
    try:
        return descendant_types(spec, stype)
    except UndefinedSpriteType:
        return frozenset({stype})
