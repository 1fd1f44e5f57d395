"""Shared library shipped with a fresh store, plus the automation
benchmark script.

The base environment is bootstrapped by actually executing these scripts
through the executor under the `shared` user, one module per file. The
`aaa_decoys` module exists to make first-run automation wade through
applicable-looking but useless axioms; its name sorts before the useful
modules so the decoys are tried first.
"""

from __future__ import annotations

import copy

from .executor import Session, execute, new_session
from .kernel import Environment

_DECOY_COUNT = 24

def _decoys() -> str:
    lines = []
    for i in range(1, _DECOY_COUNT + 1):
        if i % 3 == 0:
            body = f"zd{i:02d} → zva{i:02d} ∨ zvb{i:02d}"
        elif i % 7 == 0:
            body = f"zd{i:02d} → ⊥"
        else:
            body = f"zd{i:02d} → zva{i:02d} ∧ zvb{i:02d}"
        lines.append(f"axiom dec{i:02d} : {body}.")
    return "\n".join(lines) + "\n"


_LOGIC = """\
(* Core lemmas about the propositional connectives. *)
theorem and_comm : x ∧ y → y ∧ x.
intro H. elim H. split. assumption. assumption.
qed.
theorem or_comm : x ∨ y → y ∨ x.
intro H. elim H. right. assumption. left. assumption.
qed.
theorem or_inl : x → x ∨ y.
intro H. left. assumption.
qed.
theorem or_inr : y → x ∨ y.
intro H. right. assumption.
qed.
theorem and_assoc1 : (x ∧ y) ∧ z → x ∧ (y ∧ z).
intro H. elim H. elim H1. split. assumption. split. assumption. assumption.
qed.
theorem and_assoc2 : x ∧ (y ∧ z) → (x ∧ y) ∧ z.
intro H. elim H. elim H2. split. split. assumption. assumption. assumption.
qed.
theorem distrib_and_or : x ∧ (y ∨ z) → (x ∧ y) ∨ (x ∧ z).
intro H. elim H. elim H2. left. split. assumption. assumption.
right. split. assumption. assumption.
qed.
theorem distrib_or_and : (x ∧ y) ∨ (x ∧ z) → x ∧ (y ∨ z).
intro H. elim H. elim H1. split. assumption. left. assumption.
elim H2. split. assumption. right. assumption.
qed.
theorem nn_intro : x → ¬¬x.
intro H. intro K. apply K. assumption.
qed.
definition swapped := y ∧ x.
"""

# Same-named entries in a second module: overload fodder for the
# disambiguation corpus (mirrors a library grown by several users).
_ALT = """\
theorem and_comm : x ∧ (y ∧ z) → (z ∧ y) ∧ x.
intro H. elim H. elim H2. split. split. assumption. assumption. assumption.
qed.
theorem or_inl : x → x ∨ ¬x.
intro H. left. assumption.
qed.
definition swapped := x ∨ y.
"""

SHARED_FILES: dict[str, str] = {
    "aaa_decoys.ma": _decoys(),
    "logic.ma": _LOGIC,
    "alt.ma": _ALT,
}

# ordered so the search-heavy disjunctive goals run before the session
# has accumulated generically applicable bench lemmas of its own
BENCH_THEOREMS = [
    "(a ∧ b) ∨ c → c ∨ (b ∧ a)",
    "(a ∨ b) ∨ c → c ∨ (b ∨ a)",
    "¬(a ∨ b) → ¬a ∧ ¬b",
    "¬a ∧ ¬b → ¬(a ∨ b)",
    "((a ∨ b) → c) → (a → c) ∧ (b → c)",
    "(a → c) ∧ (b → c) → (a ∨ b) → c",
    "¬¬(a ∧ b) → ¬¬a ∧ ¬¬b",
    "a ∧ (b ∧ c) → (c ∧ a) ∧ b",
    "zd05 → zvb05 ∧ zva05",
    "zd06 → zvb06 ∨ zva06",
]

BENCH_SCRIPT = "".join(
    f"theorem bench{i:02d} : {f}.\nauto depth 4.\nqed.\n"
    for i, f in enumerate(BENCH_THEOREMS, start=1)
)

SHARED_FILES["bench.ma"] = BENCH_SCRIPT


def build_shared_env() -> Environment:
    """Execute the shared scripts and return the resulting environment."""
    env = Environment()
    for filename in sorted(SHARED_FILES):
        if filename == "bench.ma":
            continue  # the benchmark is run by clients, not preloaded
        module = filename.rsplit(".", 1)[0]
        session = new_session("bootstrap", "shared", env, module=module)
        result = execute(session, SHARED_FILES[filename], mode="all")
        if result.error is not None or result.choices is not None:
            raise RuntimeError(
                f"shared library {filename} failed to execute: "
                f"{result.error or result.choices}")
        env = session.status.env
    return env


_cached_env: Environment | None = None


def shared_env() -> Environment:
    """Cached copy of the bootstrapped shared environment."""
    global _cached_env
    if _cached_env is None:
        _cached_env = build_shared_env()
    return copy.deepcopy(_cached_env)
