"""Per-session statement-granular execution.

Owns the prover status, the undo snapshot stack, consumed-length
accounting, and assembly of the four-part execution result (consumed
scalars, enriched statements, open goals, error or choice request).
All offsets in results are Unicode-scalar positions into the submitted
text; anything reported in error/choices lies in the unconsumed part.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, replace
from typing import Optional, Union

from .disambiguator import (ChoiceRequest, Disambiguated, DisambiguationError,
                            ast_to_formula, disambiguate)
from .enricher import EnrichedStatement, enrich
from .kernel import (Axiom, Definition, Environment, KernelError, Lemma,
                     LibUri, Formula)
from .scriptlang import (ApplyT, AssumptionT, AutoT, AxiomDecl, DefinitionDecl,
                         ElimT, ExactT, IntroT, LeftT, NotationDecl,
                         NotationError, NotationTable, ParseError, Qed, RightT,
                         SplitT, Statement, TacticStmt, TheoremDecl,
                         default_table, lex_tolerant, parse_statement,
                         register_notation)
from .tactics import (Apply, Assumption, AutoFailure, AutoTrace, Elim, Exact,
                      Goal, HypArg, Intro, KernelRejection, Left, LemArg,
                      ProofState, Right, Split, TacticError, apply_tactic,
                      auto_search, close_first_goal, open_proof, replay,
                      DEFAULT_DEPTH)


@dataclass
class ProverStatus:
    user_id: str
    env: Environment
    notation: NotationTable
    proof: Optional[ProofState] = None
    module: str = "scratch"  # module for this session's declarations


@dataclass
class StepSnapshot:
    pre_status: ProverStatus  # full deep copy taken before the step
    enriched: EnrichedStatement


@dataclass
class Session:
    id: str
    status: ProverStatus
    history: list[StepSnapshot] = field(default_factory=list)


@dataclass(frozen=True)
class ExecError:
    code: str  # parse | tactic | kernel | order
    message: str
    offset: int
    length: int


@dataclass
class ExecResult:
    consumed: int
    statements: list[EnrichedStatement]
    goals: list[Goal]
    error: Optional[ExecError] = None
    choices: Optional[ChoiceRequest] = None


def new_session(session_id: str, user_id: str, base_env: Environment,
                module: str = "scratch") -> Session:
    status = ProverStatus(user_id, copy.deepcopy(base_env), default_table(),
                          None, module)
    return Session(session_id, status)


def current_goals(session: Session) -> list[Goal]:
    proof = session.status.proof
    return list(proof.goals) if proof is not None else []


def undo(session: Session, steps: Union[int, str]) -> tuple[int, list[Goal]]:
    """Pop snapshots; "all" or a count >= history depth restores the
    session-initial status. Returns (remaining depth, current goals)."""
    depth = len(session.history)
    n = depth if steps == "all" else min(int(steps), depth)
    if n > 0:
        oldest = session.history[depth - n]
        session.status = oldest.pre_status
        del session.history[depth - n:]
    return len(session.history), current_goals(session)


def _user_uri(status: ProverStatus, name: str) -> LibUri:
    return LibUri("lib", status.user_id, status.module, name)


class _StmtError(Exception):
    def __init__(self, code: str, message: str, offset: int, length: int):
        super().__init__(message)
        self.err = ExecError(code, message, offset, length)


def _evaluate(status: ProverStatus, stmt: Statement, dis: Disambiguated,
              ) -> Optional[AutoTrace]:
    """Apply one disambiguated statement to the status, in place.

    Returns a fresh trace when an untraced bare auto succeeded."""
    body = stmt.ast
    res = dis.resolution

    def order_error(message: str) -> _StmtError:
        return _StmtError("order", message, stmt.start, stmt.end - stmt.start)

    if isinstance(body, (AxiomDecl, DefinitionDecl, TheoremDecl)):
        if status.proof is not None:
            raise order_error("a proof is still open")
        uri = _user_uri(status, body.name)
        if status.env.contains(uri):
            raise order_error(f"{uri} already exists")
        if isinstance(body, DefinitionDecl):
            formula = ast_to_formula(body.body, res)
            status.env.add(uri, Definition(formula))
        elif isinstance(body, AxiomDecl):
            status.env.add(uri, Axiom(ast_to_formula(body.formula, res)))
        else:
            status.proof = open_proof(body.name,
                                      ast_to_formula(body.formula, res),
                                      status.env)
        return None

    if isinstance(body, NotationDecl):
        try:
            status.notation = register_notation(status.notation, body)
        except NotationError as e:
            raise _StmtError("parse", str(e), stmt.start,
                             stmt.end - stmt.start)
        return None

    if isinstance(body, Qed):
        if status.proof is None:
            raise order_error("qed without an open proof")
        if status.proof.goals:
            raise order_error(f"{len(status.proof.goals)} goals remain")
        uri = _user_uri(status, status.proof.name)
        if status.env.contains(uri):
            raise order_error(f"{uri} already exists")
        status.env.add(uri, Lemma(status.proof.statement, status.proof.proof))
        status.proof = None
        return None

    # tactics
    if status.proof is None:
        raise order_error("tactic outside a proof")
    if not status.proof.goals:
        raise order_error("no goals left; expected qed")
    t = body.tactic

    def resolve_arg(name: str, tok: int):
        if tok in dis.hypothesis_toks:
            return HypArg(name)
        return LemArg(res[tok])

    try:
        if isinstance(t, AutoT):
            goal = status.proof.goals[0]
            depth = t.depth if t.depth is not None else DEFAULT_DEPTH
            if t.traced:
                trace = AutoTrace(tuple(res[tok] for _, tok in t.using), depth)
                term, _, _ = replay(goal, status.env, trace)
                new_trace = None
            elif t.using or t.depth is not None:
                allowed = tuple(res[tok] for _, tok in t.using) if t.using else None
                term, _, _ = auto_search(goal, status.env, depth,
                                         allowed=allowed)
                new_trace = None  # explicit arguments are kept as written
            else:
                term, new_trace, _ = auto_search(goal, status.env, depth)
            status.proof = close_first_goal(status.proof, term, status.env)
            return new_trace
        if isinstance(t, IntroT):
            tac = Intro(t.name)
        elif isinstance(t, ApplyT):
            tac = Apply(resolve_arg(t.arg, t.tok))
        elif isinstance(t, ExactT):
            tac = Exact(resolve_arg(t.arg, t.tok))
        elif isinstance(t, ElimT):
            tac = Elim(resolve_arg(t.arg, t.tok))
        elif isinstance(t, AssumptionT):
            tac = Assumption()
        elif isinstance(t, SplitT):
            tac = Split()
        elif isinstance(t, LeftT):
            tac = Left()
        elif isinstance(t, RightT):
            tac = Right()
        else:
            raise TacticError(f"unknown tactic {type(t).__name__}")
        status.proof = apply_tactic(status.proof, tac, status.env)
        return None
    except AutoFailure as e:
        raise _StmtError("tactic", f"auto failed after {e.stats.nodes} nodes",
                         stmt.start, stmt.end - stmt.start)
    except KernelRejection as e:
        raise _StmtError("kernel", str(e), stmt.start, stmt.end - stmt.start)
    except TacticError as e:
        raise _StmtError("tactic", str(e), stmt.start, stmt.end - stmt.start)


def execute(session: Session, text: str, mode: str = "all") -> ExecResult:
    """Run statements from the front of text: one for mode="one", until
    exhaustion or failure for mode="all"."""
    assert mode in ("one", "all")
    status = session.status
    consumed = 0
    statements: list[EnrichedStatement] = []

    def result(error: Optional[ExecError] = None,
               choices: Optional[ChoiceRequest] = None) -> ExecResult:
        return ExecResult(consumed, statements, current_goals(session),
                          error, choices)

    while True:
        remainder = text[consumed:]
        out = lex_tolerant(remainder, status.notation.symbol_texts())
        has_real = any(t.kind != "comment" for t in out.tokens)
        if not has_real:
            if out.error is not None:
                return result(error=ExecError(
                    "parse", out.error.message,
                    consumed + out.error.offset, 1))
            return result()  # trailing trivia is never consumed

        try:
            stmt, _next = parse_statement(out.tokens, out.links,
                                          status.notation, 0, remainder, 0,
                                          out.traces)
        except ParseError as e:
            if out.error is not None and e.offset >= out.error.offset:
                return result(error=ExecError(
                    "parse", out.error.message,
                    consumed + out.error.offset, 1))
            return result(error=ExecError("parse", e.message,
                                          consumed + e.offset,
                                          max(e.length, 1)))

        proof = status.proof
        goal = proof.goals[0] if proof is not None and proof.goals else None
        try:
            dis = disambiguate(stmt, out.tokens, out.links, status.env,
                               status.notation, goal)
        except DisambiguationError as e:
            return result(error=ExecError("parse", e.message,
                                          consumed + e.offset,
                                          max(e.length, 1)))
        if isinstance(dis, ChoiceRequest):
            return result(choices=replace(dis, offset=consumed + dis.offset))

        snapshot = copy.deepcopy(status)
        try:
            new_trace = _evaluate(status, stmt, dis)
        except _StmtError as e:
            session.status = snapshot  # discard partial mutation
            return result(error=ExecError(e.err.code, e.err.message,
                                          consumed + e.err.offset,
                                          e.err.length))
        except KernelError as e:
            session.status = snapshot
            return result(error=ExecError("kernel", str(e),
                                          consumed + stmt.start,
                                          stmt.end - stmt.start))
        status = session.status

        auto_tok = None
        if new_trace is not None and isinstance(stmt.ast, TacticStmt) \
                and isinstance(stmt.ast.tactic, AutoT):
            auto_tok = stmt.ast.tactic.auto_tok
        es = enrich(stmt.raw, stmt.start, dis.resolution, out.tokens,
                    trace=new_trace, auto_tok=auto_tok)
        es = replace(es, original_span=(consumed + stmt.start,
                                        stmt.end - stmt.start))
        session.history.append(StepSnapshot(snapshot, es))
        statements.append(es)
        consumed += stmt.end
        if mode == "one":
            return result()
