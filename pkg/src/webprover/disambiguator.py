"""Resolution of overloaded identifiers and notation symbols.

Per ambiguous leaf, in token order: a hyperlink hint wins outright; for
tactic arguments an applicability filter (conclusion matching against the
current goal) thins the field; a single survivor is selected silently and
anything else surfaces as a choice dialog for the user.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .kernel import (Atom, Axiom, Bot, Definition, Environment, Formula, Imp,
                     Lemma, LibUri, Or, Ref, Top, And, builtin,
                     match_conclusion, strip_premises, unfold_normalize)
from .scriptlang import (ApplyT, AutoT, AxiomDecl, DefinitionDecl, ElimT,
                         ExactT, FConn, FConst, FLeaf, FSym, FormulaAst,
                         NotationTable, Statement, TacticStmt, TheoremDecl,
                         Token, ast_leaves, ast_symbol_uses, render_formula)
from .tactics import Goal


class DisambiguationError(Exception):
    def __init__(self, message: str, offset: int, length: int):
        super().__init__(message)
        self.message = message
        self.offset = offset
        self.length = length


@dataclass(frozen=True)
class Candidate:
    uri: LibUri
    display: str
    kind: str  # lemma | axiom | definition | hypothesis | connective


@dataclass(frozen=True)
class ChoiceRequest:
    lexeme: str
    offset: int  # Unicode scalars into the submitted text
    length: int
    candidates: tuple[Candidate, ...]


Resolution = dict[int, LibUri]

_HYP_NS = "hypothesis"  # local pseudo-kind; never hyperlinked


def _entry_candidates(env: Environment, name: str,
                      kinds: tuple[type, ...]) -> list[Candidate]:
    out = []
    for uri in env.visible_with_name(name, kinds):
        entry = env.entries[uri]
        if isinstance(entry, Definition):
            display = render_formula(unfold_normalize(entry.body, env))
            kind = "definition"
        else:
            display = render_formula(unfold_normalize(entry.statement, env))
            kind = "lemma" if isinstance(entry, Lemma) else "axiom"
        out.append(Candidate(uri, display, kind))
    return out


def candidates_for_ident(env: Environment, name: str) -> list[Candidate]:
    """Formula position: visible definitions with this short name."""
    return _entry_candidates(env, name, (Definition,))


def candidates_for_tactic_arg(env: Environment, goal: Optional[Goal],
                              name: str) -> list[Candidate]:
    """Hypotheses of the current goal shadow the library."""
    if goal is not None:
        f = goal.hyp(name)
        if f is not None:
            return [Candidate(builtin("top"), render_formula(f), "hypothesis")]
    return _entry_candidates(env, name, (Lemma, Axiom))


def candidates_for_symbol(table: NotationTable, symbol: str) -> list[Candidate]:
    return [Candidate(builtin(e.connective), f"{e.fixity} {e.priority}",
                      "connective")
            for e in table.get(symbol)]


@dataclass
class Disambiguated:
    resolution: Resolution
    # leaves that denote hypotheses (tactic args), by token index
    hypothesis_toks: set[int]


def _conn_of(uri: LibUri) -> str:
    return uri.name


def disambiguate(stmt: Statement, tokens: list[Token],
                 links: dict[int, LibUri], env: Environment,
                 table: NotationTable, goal: Optional[Goal]
                 ) -> Union[Disambiguated, ChoiceRequest]:
    """Resolve every ambiguous leaf of one statement, left to right.

    Returns the total Resolution, or the first unresolved leaf's
    ChoiceRequest. Raises DisambiguationError on stale hints or when no
    interpretation applies."""
    resolution: Resolution = {}
    hypothesis_toks: set[int] = set()

    # (token index, lexeme, candidates, filter mode) per ambiguous leaf;
    # filter mode is None, "apply" (match after stripping premises) or
    # "exact" (match the whole statement)
    work: list[tuple[int, str, list[Candidate], Optional[str]]] = []

    def formula_leaves(ast: FormulaAst) -> None:
        for leaf in ast_leaves(ast):
            cands = candidates_for_ident(env, leaf.name)
            if cands:
                work.append((leaf.tok, leaf.name, cands, None))
        for sym in ast_symbol_uses(ast):
            work.append((sym.tok, sym.symbol,
                         candidates_for_symbol(table, sym.symbol), None))

    body = stmt.ast
    if isinstance(body, (AxiomDecl, DefinitionDecl, TheoremDecl)):
        formula_leaves(body.formula if not isinstance(body, DefinitionDecl)
                       else body.body)
    elif isinstance(body, TacticStmt):
        t = body.tactic
        if isinstance(t, (ApplyT, ExactT, ElimT)):
            cands = candidates_for_tactic_arg(env, goal, t.arg)
            if cands and cands[0].kind == "hypothesis":
                hypothesis_toks.add(t.tok)
            else:
                mode = ("apply" if isinstance(t, ApplyT)
                        else "exact" if isinstance(t, ExactT) else None)
                work.append((t.tok, t.arg, cands, mode))
        elif isinstance(t, AutoT):
            for name, tok in t.using:
                cands = _entry_candidates(env, name, (Lemma, Axiom))
                work.append((tok, name, cands, None))

    work.sort(key=lambda item: item[0])
    for tok_index, lexeme, cands, mode in work:
        token = tokens[tok_index]
        hint = links.get(tok_index)
        if hint is not None:
            if any(c.uri == hint for c in cands):
                resolution[tok_index] = hint
                continue
            raise DisambiguationError(
                f"stale hyperlink {hint} on {lexeme!r}",
                token.span[0], token.span[1] - token.span[0])
        if mode is not None and goal is not None:
            kept = []
            for c in cands:
                stmt_f = unfold_normalize(env.statement_of(c.uri), env)
                target = (strip_premises(stmt_f)[1] if mode == "apply"
                          else stmt_f)
                if match_conclusion(target, goal.concl) is not None:
                    kept.append(c)
            cands = kept
        if len(cands) == 1:
            resolution[tok_index] = cands[0].uri
            continue
        if len(cands) >= 2:
            return ChoiceRequest(lexeme, token.span[0],
                                 token.span[1] - token.span[0], tuple(cands))
        raise DisambiguationError(
            f"no interpretation applies to {lexeme!r}",
            token.span[0], token.span[1] - token.span[0])

    return Disambiguated(resolution, hypothesis_toks)


def ast_to_formula(ast: FormulaAst, resolution: Resolution) -> Formula:
    """Build the kernel formula once every leaf is resolved."""
    if isinstance(ast, FLeaf):
        uri = resolution.get(ast.tok)
        return Ref(uri) if uri is not None else Atom(ast.name)
    if isinstance(ast, FConst):
        return Bot() if ast.conn == "bot" else Top()
    if isinstance(ast, FConn):
        conn = ast.conn
    else:  # FSym
        uri = resolution.get(ast.tok)
        if uri is None:
            raise DisambiguationError(f"unresolved symbol {ast.symbol!r}", 0, 0)
        conn = _conn_of(uri)
    args = tuple(ast_to_formula(a, resolution) for a in ast.args)
    if conn == "not":
        return Imp(args[0], Bot())
    cls = {"imp": Imp, "and": And, "or": Or}[conn]
    return cls(args[0], args[1])
