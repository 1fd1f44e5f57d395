"""Deterministic script corpus with overloaded identifiers and symbols,
plus a scripted client that resolves choice dialogs the way a browser
client would: wrap the ambiguous token in a hyperlink and resubmit.
"""

from __future__ import annotations

import random
from typing import Callable

from webprover.disambiguator import ChoiceRequest
from webprover.executor import ExecResult, Session, execute, new_session
from webprover.kernel import Environment

ATOM_POOL = ["pa", "pb", "pc", "qa", "qb", "qc", "ra", "rb", "rc",
             "s1", "s2", "s3", "t1'", "u0", "v_1"]

# decoy axiom indices by conclusion shape (see the shared aaa_decoys module)
DECOY_AND = [1, 2, 4, 5, 8, 10, 11, 13, 16, 17, 19, 20, 22, 23]
DECOY_OR = [3, 6, 9, 12, 15, 18, 24]


def _atoms(rng: random.Random, n: int) -> list[str]:
    return rng.sample(ATOM_POOL, n)


def _plain_conj(rng: random.Random) -> str:
    x, y = _atoms(rng, 2)
    return (f"theorem th1 : {x} → {y} → {x} ∧ {y}.\n"
            "intro A. intro B. split. assumption. assumption.\nqed.\n")


def _swapped_def(rng: random.Random) -> str:
    # `swapped` is defined in two shared modules: a genuine choice
    return "theorem th1 : swapped → swapped.\nintro H. assumption.\nqed.\n"


def _and_comm_apply(rng: random.Random) -> str:
    a, b, c = _atoms(rng, 3)
    # goal shape matches both and_comm overloads, so apply asks
    return (f"theorem th1 : {a} → {b} → {c} → ({a} ∧ {b}) ∧ {c}.\n"
            "intro. intro. intro. apply and_comm. auto.\nqed.\n")


def _or_inl_apply(rng: random.Random) -> str:
    a = _atoms(rng, 1)[0]
    return (f"theorem th1 : {a} → {a} ∨ ¬{a}.\n"
            "intro. apply or_inl. assumption.\nqed.\n")


def _symbol_overload(rng: random.Random) -> str:
    x, y = _atoms(rng, 2)
    return ('notation infixr "&" for and priority 30.\n'
            'notation infixr "&" for or priority 30.\n'
            f"theorem th1 : {x} & {y} → {x} & {y}.\n"
            "intro H. assumption.\nqed.\n")


def _auto_decoy(rng: random.Random) -> str:
    if rng.random() < 0.5:
        i = rng.choice(DECOY_AND)
        concl = f"zvb{i:02d} ∧ zva{i:02d}"
    else:
        i = rng.choice(DECOY_OR)
        concl = f"zvb{i:02d} ∨ zva{i:02d}"
    return f"theorem th1 : zd{i:02d} → {concl}.\nauto.\nqed.\n"


def _axiom_exact(rng: random.Random) -> str:
    p, q = _atoms(rng, 2)
    return (f"axiom ax1 : {p} ∨ {q}.\n"
            f"theorem th1 : {p} ∨ {q}.\nexact ax1.\nqed.\n")


def _auto_using(rng: random.Random) -> str:
    a, b, d = _atoms(rng, 3)
    return (f"theorem th1 : {d} → ({a} ∧ {b}) ∨ {d}.\n"
            "auto using or_inr depth 2.\nqed.\n")


def _double_negation(rng: random.Random) -> str:
    a = _atoms(rng, 1)[0]
    return (f"theorem th1 : {a} → ¬¬{a}.\n"
            "intro H. intro K. apply K. assumption.\nqed.\n")


def _elim_case(rng: random.Random) -> str:
    a, b = _atoms(rng, 2)
    return (f"theorem th1 : {a} ∨ {b} → {b} ∨ {a}.\n"
            "intro H. elim H. right. assumption. left. assumption.\nqed.\n")


def _local_definition(rng: random.Random) -> str:
    a, b = _atoms(rng, 2)
    return (f"definition dd := {a} ∧ {b}.\n"
            f"theorem th1 : dd → {a} ∧ {b}.\nintro H. assumption.\nqed.\n")


def _fresh_notation(rng: random.Random) -> str:
    x = _atoms(rng, 1)[0]
    return ('notation infixl "=>" for imp priority 10.\n'
            f"theorem th1 : {x} => {x}.\nintro H. assumption.\nqed.\n")


TEMPLATES: list[Callable[[random.Random], str]] = [
    _plain_conj, _swapped_def, _and_comm_apply, _or_inl_apply,
    _symbol_overload, _auto_decoy, _axiom_exact, _auto_using,
    _double_negation, _elim_case, _local_definition, _fresh_notation,
]


def make_corpus(seed: int = 20240817, count: int = 56) -> list[str]:
    rng = random.Random(seed)
    return [TEMPLATES[i % len(TEMPLATES)](rng) for i in range(count)]


# ---------------------------------------------------------------------------
# Scripted client

def make_picker(rng: random.Random) -> Callable[[ChoiceRequest], str]:
    """Pick per choice dialog, but stick with one meaning per lexeme so
    repeated uses of an overloaded name stay coherent within a script."""
    memo: dict[str, str] = {}

    def pick(choices: ChoiceRequest) -> str:
        uris = [str(c.uri) for c in choices.candidates]
        prior = memo.get(choices.lexeme)
        if prior in uris:
            return prior
        chosen = uris[rng.randrange(len(uris))]
        memo[choices.lexeme] = chosen
        return chosen

    return pick


def run_resolving(base_env: Environment, script: str,
                  pick: Callable[[ChoiceRequest], str],
                  user: str = "corpus"
                  ) -> tuple[str, ExecResult, Session]:
    """Execute script, answering choice dialogs by hyperlink insertion.

    Returns the fully hinted script text, the clean final result and the
    session that ran it."""
    text = script
    for _ in range(200):
        session = new_session("c", user, base_env)
        result = execute(session, text, "all")
        assert result.error is None, (result.error, text)
        if result.choices is None:
            return text, result, session
        c = result.choices
        uri = pick(c)
        token = text[c.offset:c.offset + c.length]
        assert token == c.lexeme, (token, c)
        text = (text[:c.offset] + f'<A href="{uri}">' + token + "</A>"
                + text[c.offset + c.length:])
    raise AssertionError(f"choice dialog loop did not settle for:\n{script}")
