"""Tactic engine tests: refinement, kernel recheck, automation, replay."""

import pytest

from webprover.kernel import (And, Atom, Axiom, Bot, Environment, Imp, Lemma,
                              LibUri, Or, Top, check)
from webprover.tactics import (Apply, Assumption, AutoFailure, AutoTrace,
                               Elim, Exact, Goal, HypArg, Intro, LemArg, Left,
                               Right, Split, TacticError, apply_tactic,
                               auto_search, open_proof, replay)

A, B, C = Atom("a"), Atom("b"), Atom("c")


def _run(statement, tactics, env=None):
    env = env or Environment()
    ps = open_proof("t", statement, env)
    for t in tactics:
        ps = apply_tactic(ps, t, env)
    return ps


def test_full_proof_checks_in_kernel():
    env = Environment()
    ps = _run(Imp(And(A, B), And(B, A)),
              [Intro("H"), Elim(HypArg("H")), Split(),
               Assumption(), Assumption()], env)
    assert ps.goals == ()
    assert check(ps.proof, ps.statement, env) is None


def test_intro_names_and_freshness():
    ps = _run(Imp(A, Imp(B, C)), [Intro(None), Intro(None)])
    names = [n for n, _ in ps.goals[0].hyps]
    assert names == ["H1", "H2"]
    with pytest.raises(TacticError):
        _run(Imp(A, Imp(A, A)), [Intro("H"), Intro("H")])


def test_left_right_split():
    ps = _run(Or(A, B), [Left()])
    assert ps.goals[0].concl == A
    ps = _run(Or(A, B), [Right()])
    assert ps.goals[0].concl == B
    ps = _run(And(A, B), [Split()])
    assert [g.concl for g in ps.goals] == [A, B]


def test_assumption_closes_top():
    ps = _run(Top(), [Assumption()])
    assert ps.goals == ()


def test_apply_hypothesis_strips_all_premises():
    ps = _run(Imp(Imp(A, Imp(B, C)), Imp(A, Imp(B, C))),
              [Intro("F"), Intro("Ha"), Intro("Hb"), Apply(HypArg("F")),
               Assumption(), Assumption()])
    assert ps.goals == ()


def test_apply_lemma_extends_schema_by_identity():
    env = Environment()
    uri = LibUri("lib", "u", "m", "step")
    env.add(uri, Axiom(Imp(Atom("x"), And(Atom("y"), Atom("z")))))
    # conclusion fixes y and z, x stays itself
    ps = open_proof("t", Imp(Atom("x"), And(A, B)), env)
    ps = apply_tactic(ps, Intro("H"), env)
    ps = apply_tactic(ps, Apply(LemArg(uri)), env)
    assert ps.goals[0].concl == Atom("x")
    ps = apply_tactic(ps, Assumption(), env)
    assert ps.goals == ()


def test_exact_requires_whole_statement_match():
    env = Environment()
    uri = LibUri("lib", "u", "m", "ax")
    env.add(uri, Axiom(Or(Atom("x"), Atom("y"))))
    ps = open_proof("t", Or(A, B), env)
    ps = apply_tactic(ps, Exact(LemArg(uri)), env)
    assert ps.goals == ()
    ps2 = open_proof("t", And(A, B), env)
    with pytest.raises(TacticError):
        apply_tactic(ps2, Exact(LemArg(uri)), env)


def test_elim_bot():
    ps = _run(Imp(Bot(), C), [Intro("H"), Elim(HypArg("H"))])
    assert ps.goals == ()


def test_elim_or_branches():
    ps = _run(Imp(Or(A, B), Or(B, A)),
              [Intro("H"), Elim(HypArg("H")), Right(), Assumption(),
               Left(), Assumption()])
    assert ps.goals == ()


def test_tactic_mismatch_errors():
    with pytest.raises(TacticError):
        _run(And(A, B), [Intro(None)])
    with pytest.raises(TacticError):
        _run(Imp(A, B), [Split()])
    with pytest.raises(TacticError):
        _run(A, [Assumption()])
    with pytest.raises(TacticError):
        _run(Imp(A, B), [Intro("H"), Elim(HypArg("H"))])


# -- automation -------------------------------------------------------------

def test_auto_structural():
    env = Environment()
    term, trace, stats = auto_search(
        Goal((), Imp(And(A, Or(B, C)), Or(And(A, B), And(A, C)))), env)
    assert check(term, Imp(And(A, Or(B, C)), Or(And(A, B), And(A, C))),
                 env) is None
    assert trace.lemmas == () and trace.depth == 1
    assert 0 < stats.nodes <= stats.budget


def test_auto_depth_limit():
    env = Environment()
    # two chained backchains need depth 2
    goal = Goal((), Imp(A, Imp(Imp(A, B), Imp(Imp(B, C), C))))
    with pytest.raises(AutoFailure):
        auto_search(goal, env, depth=1)
    term, trace, _ = auto_search(goal, env, depth=2)
    assert trace.depth == 2
    assert check(term, goal.concl, env) is None


def test_auto_uses_library_and_records_trace(fresh_shared_env):
    env = fresh_shared_env
    goal = Goal(((("H", Atom("zd05"))),), And(Atom("zvb05"), Atom("zva05")))
    term, trace, _ = auto_search(goal, env, depth=2)
    assert [str(u) for u in trace.lemmas] == ["lib://shared/aaa_decoys#dec05"]


def test_auto_budget_exhaustion_reports_nodes():
    env = Environment()
    goal = Goal((), Imp(A, Imp(Imp(A, B), Imp(Imp(B, C), C))))
    with pytest.raises(AutoFailure) as exc:
        auto_search(goal, env, depth=3, budget=3)
    assert exc.value.stats.nodes == 3


def test_replay_dominates_and_finds_same_proof(fresh_shared_env):
    env = fresh_shared_env
    goal = Goal((), Imp(Atom("zd06"), Or(Atom("zvb06"), Atom("zva06"))))
    term, trace, stats = auto_search(goal, env, depth=4)
    term2, trace2, stats2 = replay(goal, env, trace)
    assert term2 == term
    assert trace2 == trace
    assert stats2.nodes <= stats.nodes


def test_replay_restricted_to_allowed_lemmas(fresh_shared_env):
    env = fresh_shared_env
    goal = Goal((), Imp(Atom("zd06"), Or(Atom("zvb06"), Atom("zva06"))))
    # an empty lemma set cannot close this goal at any depth
    with pytest.raises(AutoFailure):
        replay(goal, env, AutoTrace((), 4))
