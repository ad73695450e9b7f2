"""
Indentation-aware tokenizer for VGDL game descriptions
"""

import logging
import re
from dataclasses import dataclass
from enum import Enum

from vgdl_ast import VGDLError

logger = logging.getLogger(__name__)

DEFAULT_TAB_WIDTH = 4

_IDENTIFIER_RE = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')
_NUMBER_RE = re.compile(r'^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$')

# Characters that end a word
_WORD_BREAKS = ' \t>='


class TokenKind(str, Enum):
    IDENTIFIER = 'IDENTIFIER'
    CHAR = 'CHAR'
    GT = 'GT'
    EQUALS = 'EQUALS'
    LITERAL = 'LITERAL'
    NEWLINE = 'NEWLINE'
    INDENT = 'INDENT'
    DEDENT = 'DEDENT'
    EOF = 'EOF'


WORD_KINDS = frozenset({TokenKind.IDENTIFIER, TokenKind.CHAR, TokenKind.LITERAL})


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int
    col: int

    def __str__(self):
        if self.kind in WORD_KINDS:
            return f'{self.kind.value}({self.text})'
        return self.kind.value


class ParseCategory(str, Enum):
    KEYWORD = 'Keyword'
    SYNTAX = 'Syntax'


class ParseError(VGDLError):
    """
    A game description or level that cannot be parsed.

    category is KEYWORD when the structure is sound but a reserved-word
    position holds an unknown word, SYNTAX for everything else.
    """

    def __init__(self, category, message, line=0, col=0):
        super().__init__(f'{category.value} error at {line}:{col}: {message}')
        self.category = category
        self.message = message
        self.line = line
        self.col = col

    @classmethod
    def syntax(cls, message, line=0, col=0):
        return cls(ParseCategory.SYNTAX, message, line, col)

    @classmethod
    def keyword(cls, message, line=0, col=0):
        return cls(ParseCategory.KEYWORD, message, line, col)


def classify_word(word):
    """Token kind of a whitespace-delimited word"""
    if _IDENTIFIER_RE.match(word):
        return TokenKind.IDENTIFIER
    if _NUMBER_RE.match(word):
        return TokenKind.LITERAL
    if len(word) == 1:
        return TokenKind.CHAR
    return TokenKind.LITERAL


def measure_indent(line, tab_width=DEFAULT_TAB_WIDTH):
    """
    Measure the leading whitespace of a line

    Args:
        line (str): Source line without its newline
        tab_width (int): Columns a tab counts for

    Returns:
        tuple: (indent column, index of the first non-blank character)
    """
    column = 0
    index = 0
    for ch in line:
        if ch == ' ':
            column += 1
        elif ch == '\t':
            column += tab_width
        else:
            break
        index += 1
    return column, index


def _strip_comment(line):
    position = line.find('#')
    return line if position < 0 else line[:position]


def _scan_words(content, start, lineno):
    tokens = []
    i = start
    n = len(content)
    while i < n:
        ch = content[i]
        if ch in ' \t':
            i += 1
        elif ch == '>':
            tokens.append(Token(TokenKind.GT, '>', lineno, i + 1))
            i += 1
        elif ch == '=':
            tokens.append(Token(TokenKind.EQUALS, '=', lineno, i + 1))
            i += 1
        else:
            j = i
            while j < n and content[j] not in _WORD_BREAKS:
                j += 1
            word = content[i:j]
            tokens.append(Token(classify_word(word), word, lineno, i + 1))
            i = j
    return tokens


def tokenize(text, tab_width=DEFAULT_TAB_WIDTH):
    """
    Split VGDL source into tokens with INDENT/DEDENT layout tokens

    Args:
        text (str): Game description source (LF or CRLF line endings)
        tab_width (int): Columns a tab counts for

    Returns:
        list: Token list ending with EOF

    Raises:
        ParseError: On a dedent to a column that is not on the indent stack
    """
    tokens = []
    indent_stack = [0]
    lines = text.split('\n')

    for lineno, raw_line in enumerate(lines, start=1):
        content = _strip_comment(raw_line.rstrip('\r'))
        if not content.strip():
            continue

        column, first = measure_indent(content, tab_width)
        if column > indent_stack[-1]:
            indent_stack.append(column)
            tokens.append(Token(TokenKind.INDENT, '', lineno, 1))
        elif column < indent_stack[-1]:
            while column < indent_stack[-1]:
                indent_stack.pop()
                tokens.append(Token(TokenKind.DEDENT, '', lineno, 1))
            if column != indent_stack[-1]:
                raise ParseError.syntax(
                    f'Inconsistent dedent to column {column}', lineno, first + 1
                )

        tokens.extend(_scan_words(content, first, lineno))
        tokens.append(Token(TokenKind.NEWLINE, '', lineno, len(content) + 1))

    eof_line = len(lines) + 1
    while len(indent_stack) > 1:
        indent_stack.pop()
        tokens.append(Token(TokenKind.DEDENT, '', eof_line, 1))
    tokens.append(Token(TokenKind.EOF, '', eof_line, 1))

    logger.debug(f'Tokenized {len(lines)} lines into {len(tokens)} tokens')
    return tokens
