"""Tokenizer for the shader subset.  Tracks 1-based line/column for
diagnostics; comments are skipped; preprocessor directives are rejected."""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import SourceError

KEYWORDS = frozenset(
    {
        "void", "bool", "int", "float",
        "vec2", "vec3", "vec4", "mat2", "mat3", "mat4", "sampler2D",
        "const", "if", "else", "for", "return", "true", "false",
        "in", "out", "inout",
    }
)

# recognized so we can reject them with a targeted message
RESERVED = frozenset(
    {
        "while", "do", "switch", "case", "default", "struct", "break",
        "continue", "discard", "precision", "uniform", "varying",
        "attribute", "layout", "highp", "mediump", "lowp", "uint",
        "ivec2", "ivec3", "ivec4", "bvec2", "bvec3", "bvec4", "uvec2",
        "uvec3", "uvec4", "samplerCube", "sampler3D",
    }
)

_PUNCT3 = ()
_PUNCT2 = ("++", "--", "+=", "-=", "*=", "/=", "==", "!=", "<=", ">=", "&&", "||")
_PUNCT1 = "+-*/%=<>!?:;,.(){}[]"


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "keyword" | "int" | "float" | "punct" | "eof"
    text: str
    line: int
    column: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def error(msg: str):
        raise SourceError(line, col, msg)

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if source.startswith("/*", i):
            end = source.find("*/", i + 2)
            if end < 0:
                error("unterminated block comment")
            skipped = source[i : end + 2]
            newlines = skipped.count("\n")
            if newlines:
                line += newlines
                col = len(skipped) - skipped.rfind("\n")
            else:
                col += len(skipped)
            i = end + 2
            continue
        if ch == "#":
            error("preprocessor directives are not supported")

        start_line, start_col = line, col

        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            kind = "keyword" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, start_line, start_col))
            col += j - i
            i = j
            continue

        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i
            is_float = False
            if source.startswith("0x", i) or source.startswith("0X", i):
                j = i + 2
                while j < n and source[j] in "0123456789abcdefABCDEF":
                    j += 1
                text = source[i:j]
                tokens.append(Token("int", text, start_line, start_col))
                col += j - i
                i = j
                continue
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == ".":
                is_float = True
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    is_float = True
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            if j < n and source[j] in "fF":
                is_float = True
                j += 1
                text = source[i : j - 1]
            else:
                text = source[i:j]
            tokens.append(Token("float" if is_float else "int", text, start_line, start_col))
            col += j - i
            i = j
            continue

        two = source[i : i + 2]
        if two in _PUNCT2:
            tokens.append(Token("punct", two, start_line, start_col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT1:
            tokens.append(Token("punct", ch, start_line, start_col))
            i += 1
            col += 1
            continue
        error(f"unexpected character {ch!r}")

    tokens.append(Token("eof", "", line, col))
    return tokens
