#!/usr/bin/env python3
'''Tokenizer shared by the .cqa, .facts and .dl readers.'''

from dataclasses import dataclass
from typing import List, Optional

from ..errors import QuerySyntaxError

PUNCTUATION = (':-', '!=', '(', ')', '|', ',', '.', '@', '!', '=')


@dataclass(frozen=True)
class Token:
    kind: str  # ident, int, string, punct, directive, eof
    text: str
    line: int
    column: int
    value: object = None

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.column})"


def _is_name_start(c: str) -> bool:
    return c.isalpha() or c == '_'


def _is_name_char(c: str) -> bool:
    return c.isalnum() or c == '_'


def lex(text: str, error_cls: type = QuerySyntaxError) -> List[Token]:
    '''Split source text into tokens; `#` starts a comment that runs to end of line.'''
    tokens: List[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def fail(msg: str) -> None:
        raise error_cls(msg, line, col)

    while i < n:
        c = text[i]
        if c == '\n':
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c == '#':
            while i < n and text[i] != '\n':
                i += 1
            continue
        start_line, start_col = line, col
        if c == '@' and i + 1 < n and _is_name_start(text[i + 1]):
            j = i + 1
            while j < n and _is_name_char(text[j]):
                j += 1
            word = text[i + 1:j]
            if word in ('stratum', 'edb', 'goal'):
                tokens.append(Token('directive', word, start_line, start_col))
                col += j - i
                i = j
                continue
        if _is_name_start(c):
            j = i
            while j < n and _is_name_char(text[j]):
                j += 1
            tokens.append(Token('ident', text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if c.isdigit() or (c == '-' and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token('int', text[i:j], start_line, start_col, int(text[i:j])))
            col += j - i
            i = j
            continue
        if c == '"':
            j = i + 1
            raw = bytearray()
            while True:
                if j >= n or text[j] == '\n':
                    fail("unterminated string literal")
                ch = text[j]
                if ch == '"':
                    break
                if ch == '\\':
                    if j + 1 >= n:
                        fail("dangling escape in string literal")
                    esc = text[j + 1]
                    if esc in '"\\':
                        raw.append(ord(esc))
                        j += 2
                    elif esc == 'x' and j + 3 < n:
                        try:
                            raw.append(int(text[j + 2:j + 4], 16))
                        except ValueError:
                            fail("bad \\x escape in string literal")
                        j += 4
                    else:
                        fail(f"unknown escape \\{esc}")
                    continue
                raw.extend(ch.encode('utf-8'))
                j += 1
            tokens.append(Token('string', text[i:j + 1], start_line, start_col, bytes(raw)))
            col += j + 1 - i
            i = j + 1
            continue
        for p in PUNCTUATION:
            if text.startswith(p, i):
                tokens.append(Token('punct', p, start_line, start_col))
                i += len(p)
                col += len(p)
                break
        else:
            fail(f"unexpected character {c!r}")
    tokens.append(Token('eof', '', line, col))
    return tokens


class TokenStream:
    """Cursor over a token list with expectation helpers."""

    def __init__(self, tokens: List[Token], error_cls: type = QuerySyntaxError):
        self.tokens = tokens
        self.pos = 0
        self.error_cls = error_cls

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != 'eof':
            self.pos += 1
        return tok

    def at(self, text: str, kind: str = 'punct') -> bool:
        tok = self.peek()
        return tok.kind == kind and tok.text == text

    def accept(self, text: str, kind: str = 'punct') -> Optional[Token]:
        if self.at(text, kind):
            return self.next()
        return None

    def expect(self, text: str, kind: str = 'punct') -> Token:
        tok = self.peek()
        if tok.kind != kind or tok.text != text:
            self.fail(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok)
        return self.next()

    def expect_kind(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(f"expected {what}, found {tok.text or 'end of input'!r}", tok)
        return self.next()

    def fail(self, message: str, tok: Optional[Token] = None) -> None:
        tok = tok or self.peek()
        raise self.error_cls(message, tok.line, tok.column)
