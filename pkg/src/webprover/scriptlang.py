"""Markup-aware lexer and extensible-notation parser for proof scripts.

Markup tags (`<A href="...">`, `</A>`, `<T>`, `</T>`) produce no tokens;
hyperlinks land in a side table keyed by token index and trace regions in
a span list, so the parser itself never sees markup. The notation table
is an immutable value extended at runtime by `notation` statements.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Optional, Union

from .kernel import (And, Atom, Bot, Formula, Imp, LibUri, Or, Ref, Top,
                     builtin)


class LexError(Exception):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset


class ParseError(Exception):
    def __init__(self, message: str, offset: int, length: int = 1):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset
        self.length = length


# ---------------------------------------------------------------------------
# Tokens

KEYWORDS = frozenset({
    "theorem", "axiom", "definition", "notation", "qed",
    "intro", "apply", "exact", "assumption", "split", "left", "right",
    "elim", "auto", "using", "depth",
    "infixl", "infixr", "prefix", "for", "priority",
})

STRUCTURAL_SYMBOLS = ("(", ")", ",", ":=", ":")

# builtin symbol spellings every lexer run recognizes, ident-shaped ones aside
DEFAULT_SYMBOL_TEXTS = ("→", "->", "∧", "/\\", "∨", "\\/", "¬", "~", "⊥", "⊤")


@dataclass(frozen=True)
class Token:
    kind: str  # ident | keyword | symbol | number | string | dot | comment
    lexeme: str
    span: tuple[int, int]  # Unicode scalar offsets, [start, end)
    index: int


_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_NUMBER_RE = re.compile(r"[0-9]+")
_A_OPEN_RE = re.compile(r'<A href="([^"<>]*)">')


@dataclass
class LexOutput:
    tokens: list[Token]
    links: dict[int, LibUri]
    traces: list[tuple[int, int]]
    error: Optional[LexError] = None


def lex_tolerant(text: str, extra_symbols: tuple[str, ...] = ()) -> LexOutput:
    """Lex as far as possible; on error the tokens so far are kept."""
    symbols = sorted(
        set(STRUCTURAL_SYMBOLS) | set(DEFAULT_SYMBOL_TEXTS) | set(extra_symbols),
        key=len, reverse=True)
    tokens: list[Token] = []
    links: dict[int, LibUri] = {}
    traces: list[tuple[int, int]] = []
    pos = 0
    n = len(text)
    a_uri: Optional[LibUri] = None
    a_open = 0  # offset of the pending <A>, for error reporting
    a_wrapped: list[Token] = []
    t_start: Optional[int] = None
    t_open = 0

    def err(message: str, offset: int) -> LexOutput:
        return LexOutput(tokens, links, traces, LexError(message, offset))

    def emit(kind: str, lexeme: str, start: int, end: int) -> None:
        tok = Token(kind, lexeme, (start, end), len(tokens))
        tokens.append(tok)
        if a_uri is not None:
            a_wrapped.append(tok)

    while pos < n:
        c = text[pos]
        if c.isspace():
            pos += 1
            continue
        if text.startswith("(*", pos):
            depth_c = 1
            j = pos + 2
            while j < n and depth_c:
                if text.startswith("(*", j):
                    depth_c += 1
                    j += 2
                elif text.startswith("*)", j):
                    depth_c -= 1
                    j += 2
                else:
                    j += 1
            if depth_c:
                return err("unterminated comment", pos)
            emit("comment", text[pos:j], pos, j)
            pos = j
            continue
        if c == "<":
            if text.startswith("</A>", pos):
                if a_uri is None:
                    return err("unmatched </A>", pos)
                if len(a_wrapped) != 1 or a_wrapped[0].kind not in ("ident", "symbol"):
                    return err("hyperlink must wrap exactly one identifier or symbol",
                               a_open)
                links[a_wrapped[0].index] = a_uri
                a_uri = None
                a_wrapped = []
                pos += 4
                continue
            if text.startswith("</T>", pos):
                if t_start is None:
                    return err("unmatched </T>", pos)
                if len(tokens) > t_start:
                    traces.append((t_start, len(tokens) - 1))
                t_start = None
                pos += 4
                continue
            if text.startswith("<T>", pos):
                if t_start is not None:
                    return err("nested <T> markup", pos)
                t_start = len(tokens)
                t_open = pos
                pos += 3
                continue
            m = _A_OPEN_RE.match(text, pos)
            if m:
                if a_uri is not None:
                    return err("nested <A> markup", pos)
                try:
                    a_uri = LibUri.parse(m.group(1))
                except Exception:
                    return err(f"ill-formed uri {m.group(1)!r}", pos)
                a_open = pos
                a_wrapped = []
                pos = m.end()
                continue
            return err("ill-formed markup tag", pos)
        if c == ".":
            emit("dot", ".", pos, pos + 1)
            pos += 1
            continue
        if c == '"':
            j = text.find('"', pos + 1)
            if j < 0 or "\n" in text[pos + 1:j]:
                return err("unterminated string", pos)
            emit("string", text[pos + 1:j], pos, j + 1)
            pos = j + 1
            continue
        m = _IDENT_RE.match(text, pos)
        if m:
            lexeme = m.group(0)
            kind = "keyword" if lexeme in KEYWORDS else "ident"
            emit(kind, lexeme, pos, m.end())
            pos = m.end()
            continue
        m = _NUMBER_RE.match(text, pos)
        if m:
            emit("number", m.group(0), pos, m.end())
            pos = m.end()
            continue
        for sym in symbols:
            if text.startswith(sym, pos):
                emit("symbol", sym, pos, pos + len(sym))
                pos += len(sym)
                break
        else:
            return err(f"unexpected character {c!r}", pos)
    if a_uri is not None:
        return err("unterminated markup tag", a_open)
    if t_start is not None:
        return err("unterminated markup tag", t_open)
    return LexOutput(tokens, links, traces)


def lex(text: str, extra_symbols: tuple[str, ...] = ()) \
        -> tuple[list[Token], dict[int, LibUri], list[tuple[int, int]]]:
    out = lex_tolerant(text, extra_symbols)
    if out.error is not None:
        raise out.error
    return out.tokens, out.links, out.traces


# ---------------------------------------------------------------------------
# Notation table

CONNECTIVES = ("and", "or", "imp", "not")


@dataclass(frozen=True)
class NotationEntry:
    connective: str  # and | or | imp | not | bot | top
    fixity: str      # infixl | infixr | prefix | nullary
    priority: int


@dataclass(frozen=True)
class NotationDecl:
    fixity: str
    symbol: str
    connective: str
    priority: int


@dataclass(frozen=True)
class NotationTable:
    entries: tuple[tuple[str, tuple[NotationEntry, ...]], ...]

    def get(self, symbol: str) -> tuple[NotationEntry, ...]:
        for sym, ents in self.entries:
            if sym == symbol:
                return ents
        return ()

    def symbol_texts(self) -> tuple[str, ...]:
        """Registered symbols that must be lexed by maximal munch."""
        return tuple(sym for sym, _ in self.entries
                     if not sym[0].isalpha() and sym[0] != "_")


_BUILTIN_NOTATION: list[tuple[str, NotationEntry]] = [
    ("→", NotationEntry("imp", "infixr", 10)),
    ("->", NotationEntry("imp", "infixr", 10)),
    ("∨", NotationEntry("or", "infixr", 20)),
    ("\\/", NotationEntry("or", "infixr", 20)),
    ("∧", NotationEntry("and", "infixr", 30)),
    ("/\\", NotationEntry("and", "infixr", 30)),
    ("¬", NotationEntry("not", "prefix", 40)),
    ("~", NotationEntry("not", "prefix", 40)),
    ("⊥", NotationEntry("bot", "nullary", 100)),
    ("False", NotationEntry("bot", "nullary", 100)),
    ("⊤", NotationEntry("top", "nullary", 100)),
    ("True", NotationEntry("top", "nullary", 100)),
]


def default_table() -> NotationTable:
    return NotationTable(tuple((sym, (ent,)) for sym, ent in _BUILTIN_NOTATION))


RESERVED_SYMBOLS = frozenset({"(", ")", ".", ",", ":", ":="})


class NotationError(Exception):
    pass


def register_notation(table: NotationTable, decl: NotationDecl) -> NotationTable:
    sym = decl.symbol
    if not sym or sym[0] == "<" or any(ch.isspace() for ch in sym) \
            or sym in RESERVED_SYMBOLS or '"' in sym:
        raise NotationError(f"reserved or ill-formed symbol {sym!r}")
    if decl.connective not in CONNECTIVES:
        raise NotationError(f"unknown connective {decl.connective!r}")
    if not 1 <= decl.priority <= 99:
        raise NotationError(f"priority {decl.priority} outside 1..99")
    if (decl.fixity == "prefix") != (decl.connective == "not"):
        raise NotationError("prefix fixity is for 'not' only")
    entry = NotationEntry(decl.connective, decl.fixity, decl.priority)
    existing = table.get(sym)
    if entry in existing:
        return table  # identical re-registration is a no-op
    if existing and (existing[0].fixity == "prefix") != (decl.fixity == "prefix"):
        raise NotationError(f"{sym!r} cannot mix prefix and infix entries")
    out = []
    seen = False
    for s, ents in table.entries:
        if s == sym:
            out.append((s, ents + (entry,)))
            seen = True
        else:
            out.append((s, ents))
    if not seen:
        out.append((sym, (entry,)))
    return NotationTable(tuple(out))


# ---------------------------------------------------------------------------
# Pre-disambiguation formula trees

@dataclass(frozen=True)
class FLeaf:
    name: str
    tok: int


@dataclass(frozen=True)
class FConst:
    conn: str  # bot | top


@dataclass(frozen=True)
class FConn:
    conn: str  # and | or | imp | not
    args: tuple["FormulaAst", ...]


@dataclass(frozen=True)
class FSym:
    """Use of an overloaded symbol, resolved later by the disambiguator."""
    symbol: str
    tok: int
    args: tuple["FormulaAst", ...]


FormulaAst = Union[FLeaf, FConst, FConn, FSym]


def ast_leaves(ast: FormulaAst) -> list[FLeaf]:
    if isinstance(ast, FLeaf):
        return [ast]
    if isinstance(ast, (FConn, FSym)):
        out: list[FLeaf] = []
        for a in ast.args:
            out.extend(ast_leaves(a))
        return out
    return []


def ast_symbol_uses(ast: FormulaAst) -> list[FSym]:
    if isinstance(ast, FSym):
        out = [ast]
        for a in ast.args:
            out.extend(ast_symbol_uses(a))
        return out
    if isinstance(ast, FConn):
        out = []
        for a in ast.args:
            out.extend(ast_symbol_uses(a))
        return out
    return []


# ---------------------------------------------------------------------------
# Statements

@dataclass(frozen=True)
class AxiomDecl:
    name: str
    formula: FormulaAst


@dataclass(frozen=True)
class DefinitionDecl:
    name: str
    body: FormulaAst


@dataclass(frozen=True)
class TheoremDecl:
    name: str
    formula: FormulaAst


@dataclass(frozen=True)
class IntroT:
    name: Optional[str]


@dataclass(frozen=True)
class ApplyT:
    arg: str
    tok: int


@dataclass(frozen=True)
class ExactT:
    arg: str
    tok: int


@dataclass(frozen=True)
class ElimT:
    arg: str
    tok: int


@dataclass(frozen=True)
class AssumptionT:
    pass


@dataclass(frozen=True)
class SplitT:
    pass


@dataclass(frozen=True)
class LeftT:
    pass


@dataclass(frozen=True)
class RightT:
    pass


@dataclass(frozen=True)
class AutoT:
    using: tuple[tuple[str, int], ...]  # (name, token index)
    depth: Optional[int]
    traced: bool
    auto_tok: int = 0


TacticAst = Union[IntroT, ApplyT, ExactT, ElimT, AssumptionT, SplitT, LeftT,
                  RightT, AutoT]


@dataclass(frozen=True)
class TacticStmt:
    tactic: TacticAst


@dataclass(frozen=True)
class Qed:
    pass


StatementBody = Union[AxiomDecl, DefinitionDecl, TheoremDecl, NotationDecl,
                      TacticStmt, Qed]


@dataclass(frozen=True)
class Statement:
    ast: StatementBody
    raw: str          # exact source slice, leading trivia through the dot
    start: int        # raw's offset in the submitted text
    end: int          # one past the terminating dot
    first_tok: int
    dot_tok: int


# ---------------------------------------------------------------------------
# Parser

class _Cursor:
    def __init__(self, tokens: list[Token], text_len: int):
        self.tokens = tokens
        self.i = 0
        self.text_len = text_len

    def peek(self) -> Optional[Token]:
        while self.i < len(self.tokens) and self.tokens[self.i].kind == "comment":
            self.i += 1
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return None

    def next(self) -> Token:
        t = self.peek()
        if t is None:
            raise ParseError("missing statement terminator", self.text_len, 0)
        self.i += 1
        return t

    def expect(self, kind: str, lexeme: Optional[str] = None, what: str = "") -> Token:
        t = self.next()
        if t.kind != kind or (lexeme is not None and t.lexeme != lexeme):
            wanted = what or (lexeme or kind)
            raise ParseError(f"expected {wanted}, found {t.lexeme!r}",
                             t.span[0], t.span[1] - t.span[0])
        return t


def _parse_formula(cur: _Cursor, table: NotationTable, min_prio: int) -> FormulaAst:
    left = _parse_prefix(cur, table)
    while True:
        t = cur.peek()
        if t is None or t.kind not in ("symbol", "ident"):
            break
        entries = tuple(e for e in table.get(t.lexeme)
                        if e.fixity in ("infixl", "infixr"))
        if not entries:
            break
        # the first registered entry fixes parse shape; overload choice is
        # deferred to disambiguation
        prio, fixity = entries[0].priority, entries[0].fixity
        if prio < min_prio:
            break
        cur.next()
        right = _parse_formula(cur, table,
                               prio + 1 if fixity == "infixl" else prio)
        all_entries = table.get(t.lexeme)
        if len(all_entries) > 1:
            left = FSym(t.lexeme, t.index, (left, right))
        else:
            left = FConn(entries[0].connective, (left, right))
    return left


def _parse_prefix(cur: _Cursor, table: NotationTable) -> FormulaAst:
    t = cur.next()
    if t.kind == "symbol" and t.lexeme == "(":
        inner = _parse_formula(cur, table, 0)
        cur.expect("symbol", ")")
        return inner
    if t.kind in ("symbol", "ident"):
        entries = table.get(t.lexeme)
        if entries:
            first = entries[0]
            if first.fixity == "nullary":
                return FConst(first.connective)
            if first.fixity == "prefix":
                arg = _parse_formula(cur, table, first.priority)
                if len(entries) > 1:
                    return FSym(t.lexeme, t.index, (arg,))
                return FConn("not", (arg,))
        if t.kind == "ident":
            return FLeaf(t.lexeme, t.index)
    raise ParseError(f"formula syntax error at {t.lexeme!r}",
                     t.span[0], t.span[1] - t.span[0])


def _in_trace(traces: list[tuple[int, int]], first: int, last: int) -> bool:
    return any(s <= first and last <= e for s, e in traces)


def parse_statement(tokens: list[Token], links: dict[int, LibUri],
                    table: NotationTable, from_index: int, text: str,
                    raw_from: int,
                    traces: Optional[list[tuple[int, int]]] = None,
                    ) -> tuple[Statement, int]:
    """Consume exactly one statement through its terminating dot.

    raw_from is the offset where this statement's raw slice begins (the
    previous consumption point); leading comments and whitespace belong
    to this statement.
    """
    traces = traces or []
    cur = _Cursor(tokens, len(text))
    cur.i = from_index
    head = cur.peek()
    if head is None:
        raise ParseError("missing statement terminator", len(text), 0)
    first_tok = cur.i

    body: StatementBody
    if head.kind == "keyword" and head.lexeme in ("theorem", "axiom", "definition"):
        cur.next()
        name = cur.expect("ident", what="a name")
        if head.lexeme == "definition":
            cur.expect("symbol", ":=")
            body = DefinitionDecl(name.lexeme, _parse_formula(cur, table, 0))
        else:
            cur.expect("symbol", ":")
            f = _parse_formula(cur, table, 0)
            body = (TheoremDecl(name.lexeme, f) if head.lexeme == "theorem"
                    else AxiomDecl(name.lexeme, f))
    elif head.kind == "keyword" and head.lexeme == "notation":
        cur.next()
        fix = cur.next()
        if fix.kind != "keyword" or fix.lexeme not in ("infixl", "infixr", "prefix"):
            raise ParseError("expected a fixity (infixl, infixr, prefix)",
                             fix.span[0], fix.span[1] - fix.span[0])
        sym = cur.expect("string", what="a quoted symbol")
        cur.expect("keyword", "for")
        conn = cur.next()
        if conn.kind not in ("ident", "keyword"):
            raise ParseError("expected a connective name",
                             conn.span[0], conn.span[1] - conn.span[0])
        cur.expect("keyword", "priority")
        num = cur.expect("number", what="a priority")
        body = NotationDecl(fix.lexeme, sym.lexeme, conn.lexeme, int(num.lexeme))
    elif head.kind == "keyword" and head.lexeme == "qed":
        cur.next()
        body = Qed()
    elif head.kind == "keyword" and head.lexeme in (
            "intro", "apply", "exact", "elim", "assumption", "split",
            "left", "right", "auto"):
        cur.next()
        kw = head.lexeme
        if kw == "intro":
            nxt = cur.peek()
            if nxt is not None and nxt.kind == "ident":
                cur.next()
                body = TacticStmt(IntroT(nxt.lexeme))
            else:
                body = TacticStmt(IntroT(None))
        elif kw in ("apply", "exact", "elim"):
            arg = cur.expect("ident", what="an argument name")
            cls = {"apply": ApplyT, "exact": ExactT, "elim": ElimT}[kw]
            body = TacticStmt(cls(arg.lexeme, arg.index))
        elif kw == "assumption":
            body = TacticStmt(AssumptionT())
        elif kw == "split":
            body = TacticStmt(SplitT())
        elif kw == "left":
            body = TacticStmt(LeftT())
        elif kw == "right":
            body = TacticStmt(RightT())
        else:  # auto
            using: list[tuple[str, int]] = []
            depth: Optional[int] = None
            arg_first: Optional[int] = None
            arg_last: Optional[int] = None
            nxt = cur.peek()
            if nxt is not None and nxt.kind == "keyword" and nxt.lexeme == "using":
                arg_first = cur.i
                cur.next()
                name = cur.expect("ident", what="a lemma name")
                using.append((name.lexeme, name.index))
                while True:
                    nxt = cur.peek()
                    if nxt is not None and nxt.kind == "symbol" and nxt.lexeme == ",":
                        cur.next()
                        name = cur.expect("ident", what="a lemma name")
                        using.append((name.lexeme, name.index))
                    else:
                        break
                arg_last = cur.i - 1
            nxt = cur.peek()
            if nxt is not None and nxt.kind == "keyword" and nxt.lexeme == "depth":
                if arg_first is None:
                    arg_first = cur.i
                cur.next()
                num = cur.expect("number", what="a depth")
                depth = int(num.lexeme)
                arg_last = cur.i - 1
            traced = (arg_first is not None and arg_last is not None
                      and _in_trace(traces, arg_first, arg_last))
            body = TacticStmt(AutoT(tuple(using), depth, traced, head.index))
    else:
        raise ParseError(f"unknown statement head {head.lexeme!r}",
                         head.span[0], head.span[1] - head.span[0])

    dot = cur.next()
    if dot.kind != "dot":
        raise ParseError("missing statement terminator",
                         dot.span[0], dot.span[1] - dot.span[0])
    end = dot.span[1]
    stmt = Statement(body, text[raw_from:end], raw_from, end, first_tok, dot.index)
    return stmt, cur.i


# ---------------------------------------------------------------------------
# Formula rendering

_PRIO = {"imp": 10, "or": 20, "and": 30}
_SYM = {"imp": "→", "or": "∨", "and": "∧"}


def render_formula(f: Formula) -> str:
    """Default Unicode connectives with minimal parentheses.

    Imp(x, Bot) prints as ¬x; parsing the result yields f back."""
    def go(g: Formula, required: int) -> str:
        if isinstance(g, Atom):
            return g.name
        if isinstance(g, Ref):
            return g.uri.name
        if isinstance(g, Bot):
            return "⊥"
        if isinstance(g, Top):
            return "⊤"
        if isinstance(g, Imp) and isinstance(g.right, Bot):
            s = "¬" + go(g.left, 40)
            return f"({s})" if required > 40 else s
        conn = {Imp: "imp", Or: "or", And: "and"}[type(g)]
        prio = _PRIO[conn]
        s = f"{go(g.left, prio + 1)} {_SYM[conn]} {go(g.right, prio)}"
        return f"({s})" if required > prio else s

    return go(f, 0)
