"""
Pull candidate VGDL game descriptions and levels out of free-form LLM responses
"""

import logging
import re
import textwrap
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

from vgdl_ast import BLOCK_HEADERS, VGDLError

logger = logging.getLogger(__name__)

DEFAULT_GAME_CLASSES = frozenset({'BasicGame'})

# Characters a level may use without being declared by a LevelMapping
BASE_LEVEL_CHARS = frozenset('WAG .#0123456789')

_FENCE_RE = re.compile(r'^\s*```')
_CHAR_MAP_RE = re.compile(r'^\s*(\S)\s+>\s+[A-Za-z_]')
_MARKDOWN_RE = re.compile(r'^(#{1,6}\s|\s*[-*+]\s+\S|\s*\*\*)')
_LABEL_RE = re.compile(r'^\S+$')

MIN_INLINE_ROWS = 2


class ExtractionFailure(str, Enum):
    NO_RULES = 'NoRules'


class ExtractionError(VGDLError):
    """Raised when a response holds no usable game description"""

    def __init__(self, reason, message=''):
        super().__init__(message or f'Extraction failed: {reason.value}')
        self.reason = reason


class LevelPlacement(str, Enum):
    SEPARATE = 'Separate'
    INLINE = 'Inline'
    MISSING = 'Missing'


@dataclass(frozen=True)
class Candidate:
    """A rules text and the level paired with it"""

    rules_text: str
    level_text: Optional[str]
    placement: LevelPlacement

    def to_dict(self):
        return {
            'rules_text': self.rules_text,
            'level_text': self.level_text,
            'placement': self.placement.value,
        }


class _BlockKind(Enum):
    RULES = 'rules'
    FRAGMENT = 'fragment'
    LEVEL = 'level'
    OTHER = 'other'


@dataclass
class _Block:
    kind: _BlockKind
    text: str
    inline_level: Optional[str] = None


def _first_word(lines):
    for line in lines:
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        return stripped.split()[0]
    return None


def _is_level_line(line, level_chars):
    return '=' not in line and '>' not in line and all(ch in level_chars for ch in line)


def _trim_blank(lines):
    start, end = 0, len(lines)
    while start < end and not lines[start].strip():
        start += 1
    while end > start and not lines[end - 1].strip():
        end -= 1
    return lines[start:end]


def _as_level(lines, level_chars):
    """Level text if the lines form a grid, optionally under a one-word label"""
    lines = _trim_blank([line.rstrip('\r') for line in lines])
    if not lines:
        return None
    first = lines[0].strip()
    if (
        len(lines) > 1
        and _LABEL_RE.match(first)
        and any(ch not in level_chars for ch in first)
    ):
        lines = _trim_blank(lines[1:])
    if lines and all(_is_level_line(line, level_chars) for line in lines):
        return '\n'.join(lines)
    return None


def _split_inline_level(lines, level_chars):
    """Split a trailing grid off a rules block"""
    body = _trim_blank(lines)
    end = len(body)
    start = end
    while start > 0 and body[start - 1].strip() and _is_level_line(body[start - 1], level_chars):
        start -= 1
    if end - start < MIN_INLINE_ROWS or start == 0:
        return '\n'.join(body), None
    rules = _trim_blank(body[:start])
    return '\n'.join(rules), textwrap.dedent('\n'.join(body[start:end]))


def collect_mapped_chars(text):
    """Characters that appear on 'X > sprite' lines anywhere in the text"""
    chars = set()
    for line in text.split('\n'):
        match = _CHAR_MAP_RE.match(line)
        if match:
            chars.add(match.group(1))
    return frozenset(chars)


def fenced_blocks(text):
    """
    Split text into fenced code blocks

    Args:
        text (str): Markdown-like response

    Returns:
        list: Line lists of each fenced block, in order; an unclosed final
            fence runs to the end of the text
    """
    blocks = []
    current = None
    for line in text.split('\n'):
        if _FENCE_RE.match(line):
            if current is None:
                current = []
            else:
                blocks.append(current)
                current = None
        elif current is not None:
            current.append(line.rstrip('\r'))
    if current is not None:
        blocks.append(current)
    return blocks


def _has_markdown(lines):
    body = list(lines)
    # comment lines may sit above the game class line
    while body and (not body[0].strip() or body[0].lstrip().startswith('#')):
        body.pop(0)
    return any(_MARKDOWN_RE.match(line) for line in body)


def _classify(lines, game_classes, level_chars):
    word = _first_word(lines)
    has_markdown = _has_markdown(lines)
    if word in game_classes and not has_markdown:
        rules, inline = _split_inline_level(lines, level_chars)
        return _Block(_BlockKind.RULES, rules, inline)
    if word in BLOCK_HEADERS and not has_markdown:
        return _Block(_BlockKind.FRAGMENT, '\n'.join(_trim_blank(lines)))
    level = _as_level(lines, level_chars)
    if level is not None:
        return _Block(_BlockKind.LEVEL, level)
    return _Block(_BlockKind.OTHER, '\n'.join(lines))


def _merge_fragments(blocks, game_class):
    """Fold runs of consecutive section fragments into one rules block"""
    merged = []
    run: List[str] = []

    def flush():
        if run:
            body = '\n'.join(run).split('\n')
            text = game_class + '\n' + '\n'.join(f'    {line}' if line.strip() else '' for line in body)
            merged.append(_Block(_BlockKind.RULES, text))
            logger.debug(f'Merged {len(run)} fragment blocks into one game description')
            run.clear()

    for block in blocks:
        if block.kind is _BlockKind.FRAGMENT:
            run.append(block.text)
            continue
        flush()
        merged.append(block)
    flush()
    return merged


def _pair(blocks):
    candidates = []
    for index, block in enumerate(blocks):
        if block.kind is not _BlockKind.RULES:
            continue
        level = next(
            (later.text for later in blocks[index + 1:] if later.kind is _BlockKind.LEVEL),
            None,
        )
        if level is not None:
            candidates.append(Candidate(block.text, level, LevelPlacement.SEPARATE))
        elif block.inline_level is not None:
            candidates.append(Candidate(block.text, block.inline_level, LevelPlacement.INLINE))
        else:
            candidates.append(Candidate(block.text, None, LevelPlacement.MISSING))
    return candidates


def _indented_region(lines, start):
    """Lines from start through the blank or deeper-indented lines after it"""
    header = lines[start]
    base = len(header) - len(header.lstrip())
    end = start + 1
    while end < len(lines):
        line = lines[end]
        if line.strip() and len(line) - len(line.lstrip()) <= base:
            break
        end += 1
    return end


def _adjacent_level(lines, start, level_chars):
    index = start
    while index < len(lines) and not lines[index].strip():
        index += 1
    grid = []
    while index < len(lines) and lines[index].strip():
        grid.append(lines[index])
        index += 1
    return _as_level(grid, level_chars) if grid else None


def _scan_raw(text, game_classes, level_chars):
    lines = [line.rstrip('\r') for line in text.split('\n')]

    start = None
    for index, line in enumerate(lines):
        words = line.split()
        if words and words[0] in game_classes:
            start = index
            break

    if start is None:
        for index, line in enumerate(lines[:-1]):
            if not line.strip() or line[0].isspace() or line.lstrip().startswith('#'):
                continue
            following = lines[index + 1]
            if following.strip() and following[0].isspace():
                start = index
                break

    if start is None:
        return []

    end = _indented_region(lines, start)
    rules = '\n'.join(_trim_blank(lines[start:end]))
    level = _adjacent_level(lines, end, level_chars)
    placement = LevelPlacement.SEPARATE if level is not None else LevelPlacement.MISSING
    return [Candidate(rules, level, placement)]


def extract_candidates(response, game_classes=DEFAULT_GAME_CLASSES):
    """
    Find (rules, level) candidates in an LLM response

    Args:
        response (str): Raw response text
        game_classes (frozenset): Game class names that open a description

    Returns:
        list: Candidate pairs in order of appearance

    Raises:
        ExtractionError: If no rules candidate exists
    """
    level_chars = BASE_LEVEL_CHARS | collect_mapped_chars(response)
    fences = fenced_blocks(response)

    if fences:
        blocks = [_classify(lines, game_classes, level_chars) for lines in fences]
        game_class = 'BasicGame' if 'BasicGame' in game_classes else sorted(game_classes)[0]
        candidates = _pair(_merge_fragments(blocks, game_class))
    else:
        candidates = _scan_raw(response, game_classes, level_chars)

    if not candidates:
        raise ExtractionError(ExtractionFailure.NO_RULES, 'No game description found in response')

    logger.debug(
        f'Extracted {len(candidates)} candidate(s) from {len(fences)} fenced block(s)'
    )
    return candidates

