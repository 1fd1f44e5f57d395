"""Proof engine: goal management, the tactic set, and bounded automation
that records replayable traces.

Proof construction is hole-based: the partial proof term carries one Hole
node per open goal, in goal order; tactics refine the first hole. The
automation is a depth-first backward search with a fixed candidate order,
so its output is reproducible. Depth is consumed only by apply steps
(backchaining); structural rules are free but terminate on their own.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Union

from .kernel import (And, App, Atom, Axiom, Bot, Case, Environment, ExFalso,
                     Formula, Fst, Hyp, Imp, Inl, Inr, Inst, Lam, Lemma,
                     LibUri, Or, Pair, ProofTerm, Snd, TT, Top, check,
                     formula_atoms, match_conclusion, strip_premises,
                     subst_atoms, unfold_normalize)


class TacticError(Exception):
    pass


class KernelRejection(TacticError):
    """The finished proof failed the trusted check."""


@dataclass(frozen=True)
class Hole:
    id: int


@dataclass(frozen=True)
class Goal:
    hyps: tuple[tuple[str, Formula], ...]  # ordered, names unique
    concl: Formula

    def hyp(self, name: str) -> Optional[Formula]:
        for n, f in self.hyps:
            if n == name:
                return f
        return None

    def with_hyp(self, name: str, f: Formula) -> "Goal":
        return Goal(self.hyps + ((name, f),), self.concl)


@dataclass(frozen=True)
class HypArg:
    name: str


@dataclass(frozen=True)
class LemArg:
    uri: LibUri


Arg = Union[HypArg, LemArg]


@dataclass(frozen=True)
class Intro:
    name: Optional[str] = None


@dataclass(frozen=True)
class Apply:
    arg: Arg


@dataclass(frozen=True)
class Exact:
    arg: Arg


@dataclass(frozen=True)
class Assumption:
    pass


@dataclass(frozen=True)
class Split:
    pass


@dataclass(frozen=True)
class Left:
    pass


@dataclass(frozen=True)
class Right:
    pass


@dataclass(frozen=True)
class Elim:
    arg: Arg


Tactic = Union[Intro, Apply, Exact, Assumption, Split, Left, Right, Elim]


@dataclass(frozen=True)
class ProofState:
    name: str
    statement: Formula
    goals: tuple[Goal, ...]
    hole_ids: tuple[int, ...]  # parallel to goals
    proof: ProofTerm
    next_hole: int
    next_fresh: int  # counter behind H1, H2, ... names


def open_proof(name: str, statement: Formula, env: Environment) -> ProofState:
    goal = Goal((), unfold_normalize(statement, env))
    return ProofState(name, statement, (goal,), (0,), Hole(0), 1, 1)


def _fill(term: ProofTerm, hole_id: int, repl: ProofTerm) -> ProofTerm:
    if isinstance(term, Hole):
        return repl if term.id == hole_id else term
    if isinstance(term, Lam):
        return Lam(term.binder, term.ann, _fill(term.body, hole_id, repl))
    if isinstance(term, App):
        return App(_fill(term.fun, hole_id, repl), _fill(term.arg, hole_id, repl))
    if isinstance(term, Pair):
        return Pair(_fill(term.fst, hole_id, repl), _fill(term.snd, hole_id, repl))
    if isinstance(term, Fst):
        return Fst(_fill(term.pair, hole_id, repl))
    if isinstance(term, Snd):
        return Snd(_fill(term.pair, hole_id, repl))
    if isinstance(term, Inl):
        return Inl(_fill(term.body, hole_id, repl), term.right_ann)
    if isinstance(term, Inr):
        return Inr(_fill(term.body, hole_id, repl), term.left_ann)
    if isinstance(term, Case):
        return Case(_fill(term.scrut, hole_id, repl),
                    term.binder_l, _fill(term.body_l, hole_id, repl),
                    term.binder_r, _fill(term.body_r, hole_id, repl))
    if isinstance(term, ExFalso):
        return ExFalso(_fill(term.body, hole_id, repl), term.goal_ann)
    return term


def fresh_name(goal: Goal, counter: int) -> tuple[str, int]:
    taken = {n for n, _ in goal.hyps}
    while True:
        name = f"H{counter}"
        counter += 1
        if name not in taken:
            return name, counter


def _extend_identity(sigma: dict[str, Formula], stmt: Formula) -> dict[str, Formula]:
    # schema atoms the conclusion left unconstrained instantiate to themselves
    full = dict(sigma)
    for a in formula_atoms(stmt):
        full.setdefault(a, Atom(a))
    return full


def _lemma_statement(env: Environment, uri: LibUri) -> Formula:
    return unfold_normalize(env.statement_of(uri), env)


def _refine(ps: ProofState, term: ProofTerm, subgoals: list[tuple[Goal, int]],
            env: Environment, next_hole: int, next_fresh: int) -> ProofState:
    """Replace the first goal with subgoals and fill its hole with term."""
    proof = _fill(ps.proof, ps.hole_ids[0], term)
    goals = tuple(g for g, _ in subgoals) + ps.goals[1:]
    hole_ids = tuple(h for _, h in subgoals) + ps.hole_ids[1:]
    out = ProofState(ps.name, ps.statement, goals, hole_ids, proof,
                     next_hole, next_fresh)
    if not goals:
        reason = check(proof, ps.statement, env)
        if reason is not None:
            raise KernelRejection(f"kernel rejected the finished proof: {reason}")
    return out


def apply_tactic(ps: ProofState, t: Tactic, env: Environment) -> ProofState:
    if not ps.goals:
        raise TacticError("no open goals")
    goal = ps.goals[0]
    c = goal.concl
    nh = ps.next_hole
    nf = ps.next_fresh

    if isinstance(t, Intro):
        if not isinstance(c, Imp):
            raise TacticError("intro expects an implication")
        if t.name is not None:
            if goal.hyp(t.name) is not None:
                raise TacticError(f"hypothesis name {t.name!r} already in use")
            name = t.name
        else:
            name, nf = fresh_name(goal, nf)
        sub = Goal(goal.hyps + ((name, c.left),), c.right)
        return _refine(ps, Lam(name, c.left, Hole(nh)), [(sub, nh)],
                       env, nh + 1, nf)

    if isinstance(t, (Apply, Exact)):
        arg = t.arg
        if isinstance(arg, HypArg):
            f = goal.hyp(arg.name)
            if f is None:
                raise TacticError(f"no hypothesis {arg.name!r}")
            base: ProofTerm = Hyp(arg.name)
            if isinstance(t, Exact):
                if f != c:
                    raise TacticError("exact: hypothesis does not match the goal")
                return _refine(ps, base, [], env, nh, nf)
            premises, target = strip_premises(f)
            if target != c:
                raise TacticError(f"{arg.name!r} does not apply")
            subgoal_formulas = premises
        else:
            stmt = _lemma_statement(env, arg.uri)
            if isinstance(t, Exact):
                sigma = match_conclusion(stmt, c)
                if sigma is None:
                    raise TacticError(f"{arg.uri} does not match the goal")
                return _refine(ps, Inst.make(arg.uri, sigma), [], env, nh, nf)
            premises, target = strip_premises(stmt)
            sigma = match_conclusion(target, c)
            if sigma is None:
                raise TacticError(f"{arg.uri} does not apply")
            full = _extend_identity(sigma, stmt)
            base = Inst.make(arg.uri, full)
            subgoal_formulas = [subst_atoms(p, full) for p in premises]
        subgoals = []
        term = base
        for i, pf in enumerate(subgoal_formulas):
            term = App(term, Hole(nh + i))
            subgoals.append((Goal(goal.hyps, pf), nh + i))
        return _refine(ps, term, subgoals, env, nh + len(subgoals), nf)

    if isinstance(t, Assumption):
        for name, f in goal.hyps:
            if f == c:
                return _refine(ps, Hyp(name), [], env, nh, nf)
        if isinstance(c, Top):
            return _refine(ps, TT(), [], env, nh, nf)
        raise TacticError("no hypothesis matches the goal")

    if isinstance(t, Split):
        if not isinstance(c, And):
            raise TacticError("split expects a conjunction")
        subs = [(Goal(goal.hyps, c.left), nh), (Goal(goal.hyps, c.right), nh + 1)]
        return _refine(ps, Pair(Hole(nh), Hole(nh + 1)), subs, env, nh + 2, nf)

    if isinstance(t, Left):
        if not isinstance(c, Or):
            raise TacticError("left expects a disjunction")
        return _refine(ps, Inl(Hole(nh), c.right), [(Goal(goal.hyps, c.left), nh)],
                       env, nh + 1, nf)

    if isinstance(t, Right):
        if not isinstance(c, Or):
            raise TacticError("right expects a disjunction")
        return _refine(ps, Inr(Hole(nh), c.left), [(Goal(goal.hyps, c.right), nh)],
                       env, nh + 1, nf)

    if isinstance(t, Elim):
        if not isinstance(t.arg, HypArg):
            raise TacticError("elim expects a hypothesis")
        name = t.arg.name
        f = goal.hyp(name)
        if f is None:
            raise TacticError(f"no hypothesis {name!r}")
        if isinstance(f, Bot):
            return _refine(ps, ExFalso(Hyp(name), c), [], env, nh, nf)
        if isinstance(f, And):
            n1, nf = fresh_name(goal, nf)
            sub = goal.with_hyp(n1, f.left)
            n2, nf = fresh_name(sub, nf)
            sub = sub.with_hyp(n2, f.right)
            term = App(App(Lam(n1, f.left, Lam(n2, f.right, Hole(nh))),
                           Fst(Hyp(name))), Snd(Hyp(name)))
            return _refine(ps, term, [(sub, nh)], env, nh + 1, nf)
        if isinstance(f, Or):
            n1, nf = fresh_name(goal, nf)
            n2, nf = fresh_name(goal, nf)
            term = Case(Hyp(name), n1, Hole(nh), n2, Hole(nh + 1))
            subs = [(goal.with_hyp(n1, f.left), nh),
                    (goal.with_hyp(n2, f.right), nh + 1)]
            return _refine(ps, term, subs, env, nh + 2, nf)
        raise TacticError("elim expects a conjunction, disjunction or absurdity")

    raise TacticError(f"unknown tactic {type(t).__name__}")


def close_first_goal(ps: ProofState, term: ProofTerm, env: Environment) -> ProofState:
    """Refine the first goal with a complete proof term (used by auto)."""
    return _refine(ps, term, [], env, ps.next_hole, ps.next_fresh)


# ---------------------------------------------------------------------------
# Automation

DEFAULT_DEPTH = 3
DEFAULT_BUDGET = 10000


@dataclass
class SearchStats:
    nodes: int = 0
    budget: int = DEFAULT_BUDGET


@dataclass(frozen=True)
class AutoTrace:
    lemmas: tuple[LibUri, ...]  # first-use order, duplicates removed
    depth: int


class AutoFailure(Exception):
    def __init__(self, stats: SearchStats):
        super().__init__("auto failed")
        self.stats = stats


class _Budget(Exception):
    pass


def _proof_lemmas(term: ProofTerm) -> list[LibUri]:
    """Inst uris in pre-order, first use first, duplicates dropped."""
    out: list[LibUri] = []

    def go(t: ProofTerm) -> None:
        if isinstance(t, Inst):
            if t.uri not in out:
                out.append(t.uri)
            return
        for attr in ("fun", "arg", "fst", "snd", "pair", "body", "scrut",
                     "body_l", "body_r"):
            child = getattr(t, attr, None)
            if child is not None:
                go(child)

    go(term)
    return out


def auto_search(goal: Goal, env: Environment, depth: int = DEFAULT_DEPTH,
                allowed: Optional[tuple[LibUri, ...]] = None,
                budget: int = DEFAULT_BUDGET
                ) -> tuple[ProofTerm, AutoTrace, SearchStats]:
    """Depth-first backward search with a fixed rule and candidate order.

    Raises AutoFailure (carrying the stats) on depth or budget exhaustion.
    allowed restricts the library candidates only; hypotheses are always
    available.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    stats = SearchStats(budget=budget)

    if allowed is None:
        lib = [uri for uri, entry in env.entries.items()
               if isinstance(entry, (Lemma, Axiom))
               and (uri.owner, uri.module) in env.visible]
    else:
        lib = [uri for uri in allowed if uri in env.entries
               and isinstance(env.entries[uri], (Lemma, Axiom))]
    lib.sort(key=str)
    lib_stmts = [(uri, unfold_normalize(env.entries[uri].statement, env))
                 for uri in lib]

    def search(hyps: tuple[tuple[str, Formula], ...], c: Formula, d: int,
               marks: frozenset, fresh: int
               ) -> Optional[tuple[ProofTerm, int]]:
        if stats.nodes >= stats.budget:
            raise _Budget()
        stats.nodes += 1

        for name, f in hyps:
            if f == c:
                return Hyp(name), 0
        if isinstance(c, Top):
            return TT(), 0
        if isinstance(c, Imp):
            name, fresh2 = fresh_name(Goal(hyps, c), fresh)
            sub = search(hyps + ((name, c.left),), c.right, d, marks, fresh2)
            if sub is not None:
                return Lam(name, c.left, sub[0]), sub[1]
        if isinstance(c, And):
            lres = search(hyps, c.left, d, marks, fresh)
            if lres is not None:
                rres = search(hyps, c.right, d, marks, fresh)
                if rres is not None:
                    return Pair(lres[0], rres[0]), max(lres[1], rres[1])
        if isinstance(c, Or):
            lres = search(hyps, c.left, d, marks, fresh)
            if lres is not None:
                return Inl(lres[0], c.right), lres[1]
            rres = search(hyps, c.right, d, marks, fresh)
            if rres is not None:
                return Inr(rres[0], c.left), rres[1]
        for name, f in hyps:
            if name in marks:
                continue
            if isinstance(f, Bot):
                return ExFalso(Hyp(name), c), 0
            if isinstance(f, And):
                g = Goal(hyps, c)
                n1, fresh2 = fresh_name(g, fresh)
                n2, fresh2 = fresh_name(g.with_hyp(n1, f.left), fresh2)
                sub = search(hyps + ((n1, f.left), (n2, f.right)), c, d,
                             marks | {name}, fresh2)
                if sub is not None:
                    term = App(App(Lam(n1, f.left, Lam(n2, f.right, sub[0])),
                                   Fst(Hyp(name))), Snd(Hyp(name)))
                    return term, sub[1]
            elif isinstance(f, Or):
                g = Goal(hyps, c)
                n1, fresh2 = fresh_name(g, fresh)
                n2, fresh2 = fresh_name(g, fresh2)
                lres = search(hyps + ((n1, f.left),), c, d,
                              marks | {name}, fresh2)
                if lres is not None:
                    rres = search(hyps + ((n2, f.right),), c, d,
                                  marks | {name}, fresh2)
                    if rres is not None:
                        return (Case(Hyp(name), n1, lres[0], n2, rres[0]),
                                max(lres[1], rres[1]))
        if d >= 1:
            for name, f in hyps:
                if not isinstance(f, Imp):
                    continue
                premises, target = strip_premises(f)
                if target != c:
                    continue
                args: list[ProofTerm] = []
                ud = 0
                for p in premises:
                    sub = search(hyps, p, d - 1, marks, fresh)
                    if sub is None:
                        break
                    args.append(sub[0])
                    ud = max(ud, sub[1])
                else:
                    term: ProofTerm = Hyp(name)
                    for a in args:
                        term = App(term, a)
                    return term, ud + 1
            for uri, stmt in lib_stmts:
                premises, target = strip_premises(stmt)
                sigma = match_conclusion(target, c)
                if sigma is None:
                    continue
                full = _extend_identity(sigma, stmt)
                args = []
                ud = 0
                ok = True
                for p in premises:
                    sub = search(hyps, subst_atoms(p, full), d - 1, marks, fresh)
                    if sub is None:
                        ok = False
                        break
                    args.append(sub[0])
                    ud = max(ud, sub[1])
                if ok:
                    term = Inst.make(uri, full)
                    for a in args:
                        term = App(term, a)
                    return term, ud + 1
        return None

    try:
        result = search(goal.hyps, goal.concl, depth, frozenset(), 1)
    except _Budget:
        raise AutoFailure(stats)
    if result is None:
        raise AutoFailure(stats)
    term, used = result
    trace = AutoTrace(tuple(_proof_lemmas(term)), max(1, used))
    return term, trace, stats


def replay(goal: Goal, env: Environment, trace: AutoTrace,
           budget: int = DEFAULT_BUDGET
           ) -> tuple[ProofTerm, AutoTrace, SearchStats]:
    """Re-run auto restricted to the traced lemmas at the traced depth."""
    return auto_search(goal, env, trace.depth, allowed=trace.lemmas,
                       budget=budget)
