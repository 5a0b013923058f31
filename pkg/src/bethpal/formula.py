"""AST, concrete syntax, and schema substitution for knowledge/announcement formulas.

Grammar (ASCII; unicode aliases accepted on input):

    formula := imp ( "<->" imp )?
    imp     := or ( "->" imp )?            # right associative
    or      := and ( "|" and )*
    and     := unary ( "&" unary )*
    unary   := "~" unary | "K{" ident "}" unary | "[" formula "]" unary
             | "<" formula ">" unary | "(" formula ")" | "top" | "bot" | ident

``a <-> b`` is surface sugar for ``(a -> b) & (b -> a)`` and never appears in
the AST.  Identifiers starting with a lowercase letter are object atoms or
agent names; identifiers starting with an uppercase letter are metavariables
and only appear in axiom schemas.  Unicode aliases: ¬ ∧ ∨ → ↔ ⊤ ⊥.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterator, Mapping, Union


class ParseError(ValueError):
    """Malformed formula text; carries the offending position and, when known,
    the set of token kinds that would have been acceptable there."""

    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        hint = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{message} at position {position}{hint}")
        self.position = position
        self.expected = expected


class UnknownToken(ParseError):
    """A character that cannot start any token."""


class UnboundMetavariable(KeyError):
    """A schema metavariable without a binding during substitution."""

    def __init__(self, name: str):
        super().__init__(name)
        self.name = name


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return "top"


@dataclass(frozen=True)
class Bot:
    def __str__(self) -> str:
        return "bot"


@dataclass(frozen=True)
class Neg:
    body: Formula

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Imp:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Know:
    agent: str
    body: Formula

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Announce:
    announced: Formula
    body: Formula

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Diamond:
    announced: Formula
    body: Formula

    def __str__(self) -> str:
        return print_formula(self)


Formula = Union[Atom, Top, Bot, Neg, And, Or, Imp, Know, Announce, Diamond]

TOP = Top()
BOT = Bot()

PROPOSITIONAL = "propositional"
EPISTEMIC = "epistemic"
ANNOUNCEMENT = "announcement"


def is_metavariable(name: str) -> bool:
    return name[:1].isupper()


def subformulas(f: Formula) -> Iterator[Formula]:
    """Yield f and every proper subformula, preorder."""
    yield f
    match f:
        case Neg(body) | Know(_, body):
            yield from subformulas(body)
        case And(a, b) | Or(a, b) | Imp(a, b) | Announce(a, b) | Diamond(a, b):
            yield from subformulas(a)
            yield from subformulas(b)


def depth(f: Formula) -> int:
    match f:
        case Atom() | Top() | Bot():
            return 0
        case Neg(body) | Know(_, body):
            return 1 + depth(body)
        case And(a, b) | Or(a, b) | Imp(a, b) | Announce(a, b) | Diamond(a, b):
            return 1 + max(depth(a), depth(b))
    raise TypeError(f"not a formula: {f!r}")


def atom_names(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))


def agent_names(f: Formula) -> frozenset[str]:
    return frozenset(g.agent for g in subformulas(f) if isinstance(g, Know))


def metavariables(f: Formula) -> frozenset[str]:
    return frozenset(n for n in atom_names(f) if is_metavariable(n))


@functools.cache
def classify(f: Formula) -> str:
    """Tag a formula: announcement > epistemic > propositional."""
    tag = PROPOSITIONAL
    for g in subformulas(f):
        if isinstance(g, (Announce, Diamond)):
            return ANNOUNCEMENT
        if isinstance(g, Know):
            tag = EPISTEMIC
    return tag


def is_propositional(f: Formula) -> bool:
    return classify(f) == PROPOSITIONAL


# ---------------------------------------------------------------------------
# Lexer

_PUNCT = {
    "&": "AND", "∧": "AND",
    "|": "OR", "∨": "OR",
    "~": "NOT", "¬": "NOT",
    "(": "LPAREN", ")": "RPAREN",
    "[": "LBRACK", "]": "RBRACK",
    ">": "GT",
    "→": "IMP", "↔": "IFF",
    "⊤": "TOP", "⊥": "BOT",
}


def _scan_ident(text: str, i: int) -> tuple[str, int]:
    j = i + 1
    while j < len(text) and (text[j].isalnum() or text[j] == "_"):
        j += 1
    return text[i:j], j


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks: list[tuple[str, str, int]] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if text.startswith("<->", i):
            toks.append(("IFF", "<->", i))
            i += 3
        elif text.startswith("->", i):
            toks.append(("IMP", "->", i))
            i += 2
        elif c == "<":
            toks.append(("LT", "<", i))
            i += 1
        elif c in _PUNCT:
            toks.append((_PUNCT[c], c, i))
            i += 1
        elif c.isalpha():
            ident, j = _scan_ident(text, i)
            if ident == "top":
                toks.append(("TOP", ident, i))
            elif ident == "bot":
                toks.append(("BOT", ident, i))
            elif ident == "K" and j < n and text[j] == "{":
                k = j + 1
                if k >= n or not text[k].isalpha():
                    raise ParseError("missing agent name after 'K{'", k, ("ident",))
                agent, k = _scan_ident(text, k)
                if k >= n or text[k] != "}":
                    raise ParseError("unterminated agent name", k, ("}",))
                toks.append(("KNOW", agent, i))
                i = k + 1
                continue
            else:
                toks.append(("IDENT", ident, i))
            i = j
        else:
            raise UnknownToken(f"stray character {c!r}", i)
    toks.append(("EOF", "", n))
    return toks


# ---------------------------------------------------------------------------
# Parser (recursive descent, one token lookahead)

class _Parser:
    def __init__(self, toks: list[tuple[str, str, int]]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.pos]

    def take(self) -> tuple[str, str, int]:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str) -> tuple[str, str, int]:
        t = self.peek()
        if t[0] != kind:
            raise ParseError(f"unexpected {t[1]!r}" if t[0] != "EOF" else "unexpected end of input",
                             t[2], (kind,))
        return self.take()

    def formula(self) -> Formula:
        left = self.imp()
        if self.peek()[0] == "IFF":
            self.take()
            right = self.imp()
            return And(Imp(left, right), Imp(right, left))
        return left

    def imp(self) -> Formula:
        left = self.or_()
        if self.peek()[0] == "IMP":
            self.take()
            return Imp(left, self.imp())
        return left

    def or_(self) -> Formula:
        f = self.and_()
        while self.peek()[0] == "OR":
            self.take()
            f = Or(f, self.and_())
        return f

    def and_(self) -> Formula:
        f = self.unary()
        while self.peek()[0] == "AND":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, text, pos = self.peek()
        if kind == "NOT":
            self.take()
            return Neg(self.unary())
        if kind == "KNOW":
            self.take()
            return Know(text, self.unary())
        if kind == "LBRACK":
            self.take()
            ann = self.formula()
            self.expect("RBRACK")
            return Announce(ann, self.unary())
        if kind == "LT":
            self.take()
            ann = self.formula()
            self.expect("GT")
            return Diamond(ann, self.unary())
        if kind == "LPAREN":
            self.take()
            f = self.formula()
            self.expect("RPAREN")
            return f
        if kind == "TOP":
            self.take()
            return TOP
        if kind == "BOT":
            self.take()
            return BOT
        if kind == "IDENT":
            self.take()
            return Atom(text)
        raise ParseError(f"unexpected {text!r}" if kind != "EOF" else "unexpected end of input",
                         pos, ("~", "K{...}", "[", "<", "(", "top", "bot", "ident"))


def parse_formula(text: str) -> Formula:
    p = _Parser(_tokenize(text))
    f = p.formula()
    kind, text_, pos = p.peek()
    if kind != "EOF":
        raise ParseError(f"trailing input {text_!r}", pos)
    return f


# ---------------------------------------------------------------------------
# Printer

_LEVEL_IMP = 1
_LEVEL_OR = 2
_LEVEL_AND = 3
_LEVEL_UNARY = 4


def print_formula(f: Formula) -> str:
    """Canonical text with minimal parentheses; round-trips through
    parse_formula to a structurally equal AST."""
    return _print(f, 0)


def _print(f: Formula, level: int) -> str:
    match f:
        case Atom(name):
            return name
        case Top():
            return "top"
        case Bot():
            return "bot"
        case Neg(body):
            return "~" + _print(body, _LEVEL_UNARY)
        case Know(agent, body):
            return f"K{{{agent}}} " + _print(body, _LEVEL_UNARY)
        case Announce(ann, body):
            return "[" + _print(ann, 0) + "]" + _print(body, _LEVEL_UNARY)
        case Diamond(ann, body):
            return "<" + _print(ann, 0) + ">" + _print(body, _LEVEL_UNARY)
        case And(a, b):
            s = _print(a, _LEVEL_AND) + " & " + _print(b, _LEVEL_AND + 1)
            return f"({s})" if level > _LEVEL_AND else s
        case Or(a, b):
            s = _print(a, _LEVEL_OR) + " | " + _print(b, _LEVEL_OR + 1)
            return f"({s})" if level > _LEVEL_OR else s
        case Imp(a, b):
            s = _print(a, _LEVEL_IMP + 1) + " -> " + _print(b, _LEVEL_IMP)
            return f"({s})" if level > _LEVEL_IMP else s
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Schema substitution

def substitute(schema: Formula, binding: Mapping[str, Formula]) -> Formula:
    """Simultaneously replace every metavariable atom (uppercase-initial) by
    its bound formula.  Agent names bound in the mapping are replaced too; the
    bound value must then be an Atom naming the concrete agent."""

    def agent_of(name: str) -> str:
        if name in binding:
            v = binding[name]
            if not isinstance(v, Atom):
                raise UnboundMetavariable(name)
            return v.name
        return name

    def walk(f: Formula) -> Formula:
        match f:
            case Atom(name):
                if is_metavariable(name):
                    try:
                        return binding[name]
                    except KeyError:
                        raise UnboundMetavariable(name) from None
                return f
            case Top() | Bot():
                return f
            case Neg(body):
                return Neg(walk(body))
            case And(a, b):
                return And(walk(a), walk(b))
            case Or(a, b):
                return Or(walk(a), walk(b))
            case Imp(a, b):
                return Imp(walk(a), walk(b))
            case Know(agent, body):
                return Know(agent_of(agent), walk(body))
            case Announce(a, b):
                return Announce(walk(a), walk(b))
            case Diamond(a, b):
                return Diamond(walk(a), walk(b))
        raise TypeError(f"not a formula: {f!r}")

    return walk(schema)
