"""
Unit tests for the VGDL tokenizer
"""

import pytest
import numpy as np
import sys
import os

# Add utils to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'utils'))

from vgdl_lexer import (
    ParseCategory,
    ParseError,
    TokenKind,
    classify_word,
    measure_indent,
    tokenize,
)

I = TokenKind.IDENTIFIER

# Words used by the random programs and the tokens each one produces
WORD_TOKENS = {
    'avatar': [TokenKind.IDENTIFIER],
    'wall': [TokenKind.IDENTIFIER],
    '>': [TokenKind.GT],
    'stepBack': [TokenKind.IDENTIFIER],
    'limit=0': [TokenKind.IDENTIFIER, TokenKind.EQUALS, TokenKind.LITERAL],
    'W': [TokenKind.IDENTIFIER],
    '.': [TokenKind.CHAR],
    '0.5': [TokenKind.LITERAL],
}


def kinds(tokens):
    return [token.kind for token in tokens]


def reference_layout(program):
    """Expected token kinds for a list of (depth, words) lines"""
    expected = []
    depth = 0
    for line_depth, words in program:
        if line_depth > depth:
            expected.append(TokenKind.INDENT)
        else:
            expected.extend([TokenKind.DEDENT] * (depth - line_depth))
        depth = line_depth
        for word in words:
            expected.extend(WORD_TOKENS[word])
        expected.append(TokenKind.NEWLINE)
    expected.extend([TokenKind.DEDENT] * depth)
    expected.append(TokenKind.EOF)
    return expected


def random_program(rng):
    program = []
    depth = 0
    for i in range(int(rng.integers(1, 12))):
        if i > 0:
            depth = int(rng.integers(0, depth + 2))
        words = list(rng.choice(list(WORD_TOKENS), size=int(rng.integers(1, 5))))
        program.append((depth, words))
    return program


def render_program(program, rng, unit):
    lines = []
    for depth, words in program:
        if rng.random() < 0.2:
            lines.append('')
        if rng.random() < 0.1:
            lines.append(' ' * int(rng.integers(0, 9)) + '# a comment line')
        line = ' ' * (unit * depth) + ' '.join(words)
        if rng.random() < 0.2:
            line += '   # trailing comment'
        lines.append(line)
    return '\n'.join(lines) + '\n'


class TestClassifyWord:
    """Test cases for word classification"""

    def test_identifiers(self):
        assert classify_word('avatar') == TokenKind.IDENTIFIER
        assert classify_word('GOLD') == TokenKind.IDENTIFIER
        assert classify_word('W') == TokenKind.IDENTIFIER
        assert classify_word('_hidden2') == TokenKind.IDENTIFIER

    def test_numbers_are_literals(self):
        assert classify_word('0') == TokenKind.LITERAL
        assert classify_word('1.5') == TokenKind.LITERAL
        assert classify_word('-1') == TokenKind.LITERAL

    def test_single_symbols_are_chars(self):
        assert classify_word('.') == TokenKind.CHAR
        assert classify_word('+') == TokenKind.CHAR

    def test_other_words_are_literals(self):
        assert classify_word('ab-c') == TokenKind.LITERAL


class TestMeasureIndent:
    """Test cases for indentation measurement"""

    def test_spaces(self):
        assert measure_indent('    wall') == (4, 4)

    def test_tabs_count_tab_width(self):
        assert measure_indent('\t  x', 4) == (6, 3)
        assert measure_indent('\tx', 8) == (8, 1)

    def test_no_indent(self):
        assert measure_indent('BasicGame') == (0, 0)


class TestTokenize:
    """Test cases for tokenize"""

    def test_interaction_line(self):
        tokens = tokenize('avatar wall > stepBack')
        assert kinds(tokens) == [I, I, TokenKind.GT, I, TokenKind.NEWLINE, TokenKind.EOF]
        assert [token.text for token in tokens[:4]] == ['avatar', 'wall', '>', 'stepBack']

    def test_words_break_at_gt_and_equals(self):
        tokens = tokenize('goal>Immovable color=GOLD')
        assert kinds(tokens)[:6] == [I, TokenKind.GT, I, I, TokenKind.EQUALS, I]

    def test_columns_are_one_based(self):
        tokens = tokenize('  W > wall')
        word = [token for token in tokens if token.text == 'W'][0]
        assert word.line == 1
        assert word.col == 3

    def test_comments_and_blank_lines_are_skipped(self):
        text = '# header comment\n\nBasicGame   # trailing\n\n'
        assert kinds(tokenize(text)) == [I, TokenKind.NEWLINE, TokenKind.EOF]

    def test_crlf_line_endings(self):
        assert kinds(tokenize('A\r\n    B\r\n')) == kinds(tokenize('A\n    B\n'))

    def test_indent_and_dedent(self):
        tokens = tokenize('A\n    B\n        C\nD\n')
        assert kinds(tokens) == [
            I, TokenKind.NEWLINE,
            TokenKind.INDENT, I, TokenKind.NEWLINE,
            TokenKind.INDENT, I, TokenKind.NEWLINE,
            TokenKind.DEDENT, TokenKind.DEDENT, I, TokenKind.NEWLINE,
            TokenKind.EOF,
        ]

    def test_dedents_closed_at_eof(self):
        tokens = tokenize('A\n    B\n        C')
        assert kinds(tokens)[-3:] == [TokenKind.DEDENT, TokenKind.DEDENT, TokenKind.EOF]

    def test_tab_matches_spaces(self):
        tokens = tokenize('A\n\tB\n    C\n', tab_width=4)
        assert kinds(tokens).count(TokenKind.INDENT) == 1

    def test_inconsistent_dedent_raises(self):
        with pytest.raises(ParseError) as excinfo:
            tokenize('A\n    B\n  C\n')
        assert excinfo.value.category == ParseCategory.SYNTAX
        assert excinfo.value.line == 3

    def test_empty_text(self):
        assert kinds(tokenize('')) == [TokenKind.EOF]

    @pytest.mark.parametrize('unit', [2, 4])
    def test_random_programs_match_reference_layout(self, unit):
        rng = np.random.default_rng(7 + unit)
        for _ in range(200):
            program = random_program(rng)
            text = render_program(program, rng, unit)
            assert kinds(tokenize(text)) == reference_layout(program), text


if __name__ == '__main__':
    pytest.main([__file__])
