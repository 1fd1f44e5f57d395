"""Bounded exhaustive backward sequent search, used only for testing.

Decides provability of intuitionistic propositional sequents within a
backchaining depth bound. Deliberately independent of the tactic engine:
works on frozensets of formulas, produces no proof terms, memoizes
sequents instead of ordering candidates. Depth is consumed only by
backchaining steps (on hypothesis implications or library schemas), the
same accounting the automation uses.
"""

from __future__ import annotations

from .kernel import (And, Atom, Bot, Formula, Imp, Or, Top, match_conclusion,
                     strip_premises, subst_atoms)

Sequent = tuple[frozenset, Formula]


def sequent_provable(hyps: frozenset, concl: Formula, depth: int,
                     lemmas: tuple[Formula, ...] = ()) -> bool:
    """True iff hyps entail concl within the given backchaining depth.

    lemmas are closed-over schemas (their atoms are pattern variables)."""
    memo: dict[tuple[frozenset, Formula, int], bool] = {}

    def saturate(hs: frozenset, c: Formula) -> tuple[frozenset, Formula]:
        # Invertible steps: split conjunctions in context, absorb
        # implication antecedents into the context.
        changed = True
        hs = set(hs)
        while changed:
            changed = False
            for h in list(hs):
                if isinstance(h, And):
                    hs.discard(h)
                    hs.add(h.left)
                    hs.add(h.right)
                    changed = True
            if isinstance(c, Imp):
                hs.add(c.left)
                c = c.right
                changed = True
        return frozenset(hs), c

    def prove(hs: frozenset, c: Formula, d: int) -> bool:
        hs, c = saturate(hs, c)
        key = (hs, c, d)
        if key in memo:
            return memo[key]
        memo[key] = False  # cycles count as failure at this depth
        result = step(hs, c, d)
        memo[key] = result
        return result

    def step(hs: frozenset, c: Formula, d: int) -> bool:
        if isinstance(c, Top) or c in hs or Bot() in hs:
            return True
        if isinstance(c, And):
            if prove(hs, c.left, d) and prove(hs, c.right, d):
                return True
        if isinstance(c, Or):
            if prove(hs, c.left, d) or prove(hs, c.right, d):
                return True
        for h in hs:
            if isinstance(h, Or):
                rest = hs - {h}
                if prove(rest | {h.left}, c, d) and prove(rest | {h.right}, c, d):
                    return True
        if d >= 1:
            for h in hs:
                if isinstance(h, Imp):
                    premises, target = strip_premises(h)
                    if target == c and all(prove(hs, p, d - 1) for p in premises):
                        return True
            for schema in lemmas:
                premises, target = strip_premises(schema)
                sigma = match_conclusion(target, c)
                if sigma is None:
                    continue
                full = dict(sigma)
                for p in premises:
                    inst = subst_atoms(p, full)
                    # atoms not fixed by the conclusion stay themselves
                    if not prove(hs, inst, d - 1):
                        break
                else:
                    return True
        return False

    return prove(hyps, concl, depth)


def formula_provable(f: Formula, depth: int,
                     lemmas: tuple[Formula, ...] = ()) -> bool:
    return sequent_provable(frozenset(), f, depth, lemmas)
