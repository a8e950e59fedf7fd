"""Lexer, parser and validator for the cascade toy language.

Grammar::

    program := "PROGRAM" ident ":" stmt* "END" ident ";"
    stmt    := "COPY_PROGRAM_NEXT" ident ";"
             | "IDLE" int ";"
             | cell ":=" expr ";"
             | "REPEAT" stmt* "UNTIL" "FALSE" ";"
    expr    := ["NOT"] (cell | "0" | "1")
    cell    := "VALUE" | "VALUE_NEXT" | ident

Comments are enclosed in braces. Keywords are case-insensitive and
canonicalized to upper case; identifiers keep their case.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

__all__ = [
    "TokenKind", "Token", "Position", "LexError", "ParseError", "NameMismatch",
    "CellRef", "Expr", "CopyProgramNext", "Idle", "Assign", "RepeatForever",
    "Instruction", "Program", "ValidationReport", "tokenize", "parse",
    "parse_source", "validate", "pretty", "instruction_cost", "is_loop_dialect",
    "CODE_LIMIT", "DATA_LIMIT", "KEYWORDS",
]

KEYWORDS = frozenset({
    "PROGRAM", "END", "COPY_PROGRAM_NEXT", "IDLE", "VALUE", "VALUE_NEXT",
    "NOT", "REPEAT", "UNTIL", "FALSE",
})

CODE_LIMIT = 1024   # bytes of program memory per machine
DATA_LIMIT = 1      # bytes of data memory per machine


class TokenKind(Enum):
    KEYWORD = "Keyword"
    IDENTIFIER = "Identifier"
    INTEGER = "IntegerLiteral"
    ASSIGN = "AssignSymbol"
    SEMICOLON = "Semicolon"
    COLON = "Colon"


@dataclass(frozen=True)
class Position:
    line: int
    column: int

    def __str__(self):
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    position: Position = field(default=Position(1, 1), compare=False)

    @property
    def value(self) -> int:
        return int(self.text)


class LangError(Exception):
    """Base for source-level errors; carries a position when known."""

    def __init__(self, message: str, position: Position | None = None):
        self.position = position
        where = f"{position}: " if position else ""
        super().__init__(where + message)


class LexError(LangError):
    pass


class ParseError(LangError):
    def __init__(self, message: str, position: Position | None = None, expected: str = ""):
        self.expected = expected
        super().__init__(message, position)


class NameMismatch(ParseError):
    pass


def _is_ident_start(ch: str) -> bool:
    return ch.isascii() and (ch.isalpha() or ch == "_")


def _is_ident_char(ch: str) -> bool:
    return ch.isascii() and (ch.isalnum() or ch == "_")


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def advance(k: int = 1):
        nonlocal i, line, col
        for _ in range(k):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = source[i]
        pos = Position(line, col)
        if ch.isspace():
            advance()
        elif ch == "{":
            end = source.find("}", i + 1)
            if end < 0:
                raise LexError("unterminated comment", pos)
            advance(end + 1 - i)
        elif ch == "}":
            raise LexError("unmatched '}'", pos)
        elif ch == ";":
            tokens.append(Token(TokenKind.SEMICOLON, ";", pos))
            advance()
        elif ch == ":":
            if i + 1 < n and source[i + 1] == "=":
                tokens.append(Token(TokenKind.ASSIGN, ":=", pos))
                advance(2)
            else:
                tokens.append(Token(TokenKind.COLON, ":", pos))
                advance()
        elif ch.isascii() and ch.isdigit():
            j = i
            while j < n and source[j].isascii() and source[j].isdigit():
                j += 1
            if j < n and _is_ident_char(source[j]):
                raise LexError(f"malformed number {source[i:j + 1]!r}", pos)
            tokens.append(Token(TokenKind.INTEGER, str(int(source[i:j])), pos))
            advance(j - i)
        elif _is_ident_start(ch):
            j = i
            while j < n and _is_ident_char(source[j]):
                j += 1
            word = source[i:j]
            if word.upper() in KEYWORDS:
                tokens.append(Token(TokenKind.KEYWORD, word.upper(), pos))
            else:
                tokens.append(Token(TokenKind.IDENTIFIER, word, pos))
            advance(j - i)
        else:
            raise LexError(f"illegal character {ch!r}", pos)
    return tokens


# -- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class CellRef:
    """``VALUE``, ``VALUE_NEXT`` or a named byte variable."""

    name: str

    @property
    def is_next(self) -> bool:
        return self.name == "VALUE_NEXT"

    @property
    def is_local(self) -> bool:
        return not self.is_next

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Expr:
    operand: Union[CellRef, int]
    negated: bool = False

    def __post_init__(self):
        if isinstance(self.operand, int) and self.operand not in (0, 1):
            raise ValueError("literal operands are 0 or 1")

    @property
    def reads_cell(self) -> bool:
        return isinstance(self.operand, CellRef)

    def __str__(self):
        return ("NOT " if self.negated else "") + str(self.operand)


@dataclass(frozen=True)
class CopyProgramNext:
    target: str

    def __str__(self):
        return f"COPY_PROGRAM_NEXT {self.target};"


@dataclass(frozen=True)
class Idle:
    m: int

    def __str__(self):
        return f"IDLE {self.m};"


@dataclass(frozen=True)
class Assign:
    dest: CellRef
    expr: Expr

    def __str__(self):
        return f"{self.dest} := {self.expr};"


@dataclass(frozen=True)
class RepeatForever:
    body: tuple

    def __str__(self):
        inner = " ".join(str(s) for s in self.body)
        return f"REPEAT {inner} UNTIL FALSE;" if inner else "REPEAT UNTIL FALSE;"


Instruction = Union[CopyProgramNext, Idle, Assign, RepeatForever]


@dataclass(frozen=True)
class Program:
    name: str
    body: tuple

    def __str__(self):
        return pretty(self)


def instruction_cost(ins: Instruction) -> int:
    """Number of local quanta an instruction occupies on a cascade machine."""
    if isinstance(ins, Idle):
        return ins.m
    if isinstance(ins, Assign):
        return 2 if (ins.expr.negated and ins.expr.reads_cell) else 1
    if isinstance(ins, RepeatForever):
        raise TypeError("REPEAT has no finite cost")
    return 1


def _walk(body):
    for ins in body:
        yield ins
        if isinstance(ins, RepeatForever):
            yield from _walk(ins.body)


def is_loop_dialect(p: Program) -> bool:
    return any(isinstance(i, RepeatForever) for i in _walk(p.body))


# -- parser ------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    def peek(self) -> Token | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def _pos(self) -> Position | None:
        t = self.peek()
        if t is not None:
            return t.position
        return self.toks[-1].position if self.toks else Position(1, 1)

    def fail(self, expected: str):
        t = self.peek()
        got = f"{t.text!r}" if t else "end of input"
        raise ParseError(f"expected {expected}, got {got}", self._pos(), expected)

    def expect(self, kind: TokenKind, text: str | None = None) -> Token:
        t = self.peek()
        if t is None or t.kind is not kind or (text is not None and t.text != text):
            self.fail(text or kind.value)
        self.i += 1
        return t

    def at_keyword(self, *words: str) -> bool:
        t = self.peek()
        return t is not None and t.kind is TokenKind.KEYWORD and t.text in words

    def program(self) -> Program:
        self.expect(TokenKind.KEYWORD, "PROGRAM")
        name_tok = self.expect(TokenKind.IDENTIFIER)
        self.expect(TokenKind.COLON)
        body = self.stmts(("END",))
        self.expect(TokenKind.KEYWORD, "END")
        end_tok = self.expect(TokenKind.IDENTIFIER)
        if end_tok.text != name_tok.text:
            raise NameMismatch(
                f"END {end_tok.text} does not close PROGRAM {name_tok.text}",
                end_tok.position, name_tok.text)
        self.expect(TokenKind.SEMICOLON)
        if self.peek() is not None:
            self.fail("end of input")
        return Program(name_tok.text, tuple(body))

    def stmts(self, terminators) -> list:
        out = []
        while self.peek() is not None and not self.at_keyword(*terminators):
            out.append(self.stmt())
        return out

    def stmt(self) -> Instruction:
        t = self.peek()
        if self.at_keyword("COPY_PROGRAM_NEXT"):
            self.i += 1
            target = self.expect(TokenKind.IDENTIFIER).text
            self.expect(TokenKind.SEMICOLON)
            return CopyProgramNext(target)
        if self.at_keyword("IDLE"):
            self.i += 1
            m = self.expect(TokenKind.INTEGER).value
            self.expect(TokenKind.SEMICOLON)
            return Idle(m)
        if self.at_keyword("REPEAT"):
            self.i += 1
            body = self.stmts(("UNTIL", "END"))
            self.expect(TokenKind.KEYWORD, "UNTIL")
            self.expect(TokenKind.KEYWORD, "FALSE")
            self.expect(TokenKind.SEMICOLON)
            return RepeatForever(tuple(body))
        if t is not None and (t.kind is TokenKind.IDENTIFIER or self.at_keyword("VALUE", "VALUE_NEXT")):
            dest = self.cell()
            self.expect(TokenKind.ASSIGN)
            expr = self.expr()
            self.expect(TokenKind.SEMICOLON)
            return Assign(dest, expr)
        self.fail("statement")

    def cell(self) -> CellRef:
        t = self.peek()
        if t is not None and (t.kind is TokenKind.IDENTIFIER or self.at_keyword("VALUE", "VALUE_NEXT")):
            self.i += 1
            return CellRef(t.text)
        self.fail("cell")

    def expr(self) -> Expr:
        negated = False
        if self.at_keyword("NOT"):
            self.i += 1
            negated = True
            if self.at_keyword("NOT"):
                self.fail("cell or 0/1 (NOT applies once)")
        t = self.peek()
        if t is not None and t.kind is TokenKind.INTEGER:
            if t.value not in (0, 1):
                raise ParseError(f"literal must be 0 or 1, got {t.text}", t.position, "0 or 1")
            self.i += 1
            return Expr(t.value, negated)
        return Expr(self.cell(), negated)


def parse(tokens: list[Token]) -> Program:
    return _Parser(list(tokens)).program()


def parse_source(source: str) -> Program:
    return parse(tokenize(source))


def pretty(p: Program) -> str:
    """Canonical serialization; also the basis of the code-size measure."""
    lines = [f"PROGRAM {p.name}:"]

    def emit(body, depth):
        for ins in body:
            pad = "  " * depth
            if isinstance(ins, RepeatForever):
                lines.append(pad + "REPEAT")
                emit(ins.body, depth + 1)
                lines.append(pad + "UNTIL FALSE;")
            else:
                lines.append(pad + str(ins))

    emit(p.body, 1)
    lines.append(f"END {p.name};")
    return "\n".join(lines) + "\n"


# -- validation ----------------------------------------------------------------

@dataclass
class ValidationReport:
    ok: bool
    code_size: int
    data_cells_used: int
    diagnostics: list = field(default_factory=list)


def _local_cells(p: Program) -> set[str]:
    cells = set()
    for ins in _walk(p.body):
        if isinstance(ins, Assign):
            for ref in (ins.dest, ins.expr.operand):
                if isinstance(ref, CellRef) and ref.is_local:
                    cells.add(ref.name)
    return cells


def validate(p: Program) -> ValidationReport:
    """Check model limits and dialect rules. Never raises for a bad program."""
    diags = []
    code_size = len(pretty(p).encode("utf-8"))
    cells = _local_cells(p)
    if code_size > CODE_LIMIT:
        diags.append((None, f"code size {code_size} bytes exceeds {CODE_LIMIT}"))
    if len(cells) > DATA_LIMIT:
        diags.append((None, f"{len(cells)} data cells used ({', '.join(sorted(cells))}); "
                            f"limit is {DATA_LIMIT} byte"))
    has_repeat = is_loop_dialect(p)
    copies = [i for i in _walk(p.body) if isinstance(i, CopyProgramNext)]
    if has_repeat and copies:
        diags.append((None, "dialect mix: REPEAT and COPY_PROGRAM_NEXT in one program"))
    for c in copies:
        if c.target != p.name:
            diags.append((None, f"COPY_PROGRAM_NEXT {c.target}: no such program"))
    if has_repeat and any(isinstance(i, RepeatForever) for r in p.body
                          if isinstance(r, RepeatForever) for i in _walk(r.body)):
        diags.append((None, "nested REPEAT is not supported"))
    if has_repeat and any(isinstance(i, Assign) and (i.dest.is_next or (
            isinstance(i.expr.operand, CellRef) and i.expr.operand.is_next))
            for i in _walk(p.body)):
        diags.append((None, "VALUE_NEXT has no meaning on a single Zeno machine"))
    return ValidationReport(not diags, code_size, len(cells), diags)
