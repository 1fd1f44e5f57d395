"""Trusted core: formulas, proof terms, environments and the checker for
intuitionistic propositional natural deduction.

Everything here is pure and works on immutable values; sessions snapshot
environments by copying, never by sharing mutable state.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union


class KernelError(Exception):
    """Raised on malformed terms or corrupted environments."""


class CheckFailure(KernelError):
    """Proof term does not follow the rules; carries the subterm position."""

    def __init__(self, message: str, path: tuple[int, ...] = ()):
        super().__init__(message)
        self.message = message
        self.path = path


# ---------------------------------------------------------------------------
# Library URIs

_LIB_RE = re.compile(r"^lib://([a-z0-9_]+)/([A-Za-z0-9_/]+)#([A-Za-z0-9_']+)$")
_BUILTIN_RE = re.compile(r"^builtin://logic#(and|or|imp|not|bot|top)$")


@dataclass(frozen=True)
class LibUri:
    """`lib://<owner>/<module>#<name>` or `builtin://logic#<conn>`."""

    scheme: str  # "lib" | "builtin"
    owner: str  # "" for builtins
    module: str
    name: str

    def __str__(self) -> str:
        if self.scheme == "builtin":
            return f"builtin://{self.module}#{self.name}"
        return f"lib://{self.owner}/{self.module}#{self.name}"

    @staticmethod
    def parse(text: str) -> "LibUri":
        m = _LIB_RE.match(text)
        if m:
            return LibUri("lib", m.group(1), m.group(2), m.group(3))
        m = _BUILTIN_RE.match(text)
        if m:
            return LibUri("builtin", "", "logic", m.group(1))
        raise KernelError(f"ill-formed uri: {text!r}")


def builtin(name: str) -> LibUri:
    return LibUri("builtin", "", "logic", name)


# ---------------------------------------------------------------------------
# Formulas

@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Ref:
    uri: LibUri


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Top:
    pass


Formula = Union[Atom, Ref, Imp, And, Or, Bot, Top]

BOT = Bot()
TOP = Top()


def neg(f: Formula) -> Formula:
    """Surface sugar: not A is Imp(A, Bot)."""
    return Imp(f, BOT)


def formula_atoms(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return {f.name}
    if isinstance(f, (Imp, And, Or)):
        return formula_atoms(f.left) | formula_atoms(f.right)
    return set()


def formula_refs(f: Formula) -> set[LibUri]:
    if isinstance(f, Ref):
        return {f.uri}
    if isinstance(f, (Imp, And, Or)):
        return formula_refs(f.left) | formula_refs(f.right)
    return set()


def subst_atoms(f: Formula, sigma: Mapping[str, Formula]) -> Formula:
    if isinstance(f, Atom):
        return sigma.get(f.name, f)
    if isinstance(f, Imp):
        return Imp(subst_atoms(f.left, sigma), subst_atoms(f.right, sigma))
    if isinstance(f, And):
        return And(subst_atoms(f.left, sigma), subst_atoms(f.right, sigma))
    if isinstance(f, Or):
        return Or(subst_atoms(f.left, sigma), subst_atoms(f.right, sigma))
    return f


def formula_size(f: Formula) -> int:
    if isinstance(f, (Imp, And, Or)):
        return 1 + formula_size(f.left) + formula_size(f.right)
    return 1


# ---------------------------------------------------------------------------
# Proof terms

@dataclass(frozen=True)
class Hyp:
    name: str


@dataclass(frozen=True)
class Lam:
    binder: str
    ann: Formula
    body: "ProofTerm"


@dataclass(frozen=True)
class App:
    fun: "ProofTerm"
    arg: "ProofTerm"


@dataclass(frozen=True)
class Pair:
    fst: "ProofTerm"
    snd: "ProofTerm"


@dataclass(frozen=True)
class Fst:
    pair: "ProofTerm"


@dataclass(frozen=True)
class Snd:
    pair: "ProofTerm"


@dataclass(frozen=True)
class Inl:
    body: "ProofTerm"
    right_ann: Formula


@dataclass(frozen=True)
class Inr:
    body: "ProofTerm"
    left_ann: Formula


@dataclass(frozen=True)
class Case:
    scrut: "ProofTerm"
    binder_l: str
    body_l: "ProofTerm"
    binder_r: str
    body_r: "ProofTerm"


@dataclass(frozen=True)
class ExFalso:
    body: "ProofTerm"
    goal_ann: Formula


@dataclass(frozen=True)
class TT:
    pass


@dataclass(frozen=True)
class Inst:
    """Use of a library lemma/axiom at a substitution instance.

    subst is a sorted tuple of (atom name, formula) pairs so terms stay
    hashable; it must cover exactly the atoms of the statement.
    """

    uri: LibUri
    subst: tuple[tuple[str, Formula], ...]

    @staticmethod
    def make(uri: LibUri, sigma: Mapping[str, Formula]) -> "Inst":
        return Inst(uri, tuple(sorted(sigma.items())))

    def sigma(self) -> dict[str, Formula]:
        return dict(self.subst)


ProofTerm = Union[Hyp, Lam, App, Pair, Fst, Snd, Inl, Inr, Case, ExFalso, TT, Inst]


# ---------------------------------------------------------------------------
# Environments

@dataclass(frozen=True)
class Definition:
    body: Formula


@dataclass(frozen=True)
class Axiom:
    statement: Formula


@dataclass(frozen=True)
class Lemma:
    statement: Formula
    proof: ProofTerm


Entry = Union[Definition, Axiom, Lemma]


@dataclass
class Environment:
    """Map of library entries plus the set of visible (owner, module) pairs.

    Entries are only ever added after their references resolve, so the
    definition dependency graph is acyclic by construction.
    """

    entries: dict[LibUri, Entry] = field(default_factory=dict)
    visible: set[tuple[str, str]] = field(default_factory=set)

    def resolve(self, uri: LibUri) -> Entry:
        entry = self.entries.get(uri)
        if entry is None:
            raise KernelError(f"dangling reference: {uri}")
        return entry

    def contains(self, uri: LibUri) -> bool:
        return uri in self.entries

    def add(self, uri: LibUri, entry: Entry) -> None:
        if uri in self.entries:
            raise KernelError(f"duplicate entry: {uri}")
        if isinstance(entry, Definition):
            for ref in formula_refs(entry.body):
                self.resolve(ref)
        elif isinstance(entry, Axiom):
            for ref in formula_refs(entry.statement):
                self.resolve(ref)
        else:
            result = check(entry.proof, entry.statement, self)
            if result is not None:
                raise KernelError(f"lemma {uri} does not check: {result}")
        self.entries[uri] = entry
        self.visible.add((uri.owner, uri.module))

    def visible_with_name(self, name: str, kinds: tuple[type, ...]) -> list[LibUri]:
        """Visible entries whose short name matches, uri-lexicographic order."""
        out = [
            uri
            for uri, entry in self.entries.items()
            if uri.name == name
            and (uri.owner, uri.module) in self.visible
            and isinstance(entry, kinds)
        ]
        return sorted(out, key=str)

    def statement_of(self, uri: LibUri) -> Formula:
        entry = self.resolve(uri)
        if isinstance(entry, Definition):
            raise KernelError(f"{uri} is a definition, not a statement")
        return entry.statement


# ---------------------------------------------------------------------------
# Operations

def unfold_normalize(f: Formula, env: Environment) -> Formula:
    """Expand every definition reference; the result is Ref-free."""
    if isinstance(f, Ref):
        entry = env.resolve(f.uri)
        if not isinstance(entry, Definition):
            raise KernelError(f"{f.uri} is not a definition")
        return unfold_normalize(entry.body, env)
    if isinstance(f, Imp):
        return Imp(unfold_normalize(f.left, env), unfold_normalize(f.right, env))
    if isinstance(f, And):
        return And(unfold_normalize(f.left, env), unfold_normalize(f.right, env))
    if isinstance(f, Or):
        return Or(unfold_normalize(f.left, env), unfold_normalize(f.right, env))
    return f


def infer(p: ProofTerm, hyps: Mapping[str, Formula], env: Environment,
          _path: tuple[int, ...] = ()) -> Formula:
    """Type of a proof term under the natural-deduction rules.

    Returns the unfold-normalized formula; raises CheckFailure with the
    offending subterm's position on any rule mismatch.
    """
    def fail(msg: str, path: tuple[int, ...]) -> CheckFailure:
        return CheckFailure(msg, path)

    if isinstance(p, Hyp):
        if p.name not in hyps:
            raise fail(f"unbound hypothesis {p.name!r}", _path)
        return unfold_normalize(hyps[p.name], env)
    if isinstance(p, Lam):
        ann = unfold_normalize(p.ann, env)
        inner = dict(hyps)
        inner[p.binder] = ann
        body = infer(p.body, inner, env, _path + (0,))
        return Imp(ann, body)
    if isinstance(p, App):
        fun = infer(p.fun, hyps, env, _path + (0,))
        if not isinstance(fun, Imp):
            raise fail("application of a non-implication", _path + (0,))
        arg = infer(p.arg, hyps, env, _path + (1,))
        if arg != fun.left:
            raise fail("argument type mismatch", _path + (1,))
        return fun.right
    if isinstance(p, Pair):
        return And(infer(p.fst, hyps, env, _path + (0,)),
                   infer(p.snd, hyps, env, _path + (1,)))
    if isinstance(p, Fst):
        t = infer(p.pair, hyps, env, _path + (0,))
        if not isinstance(t, And):
            raise fail("fst of a non-conjunction", _path + (0,))
        return t.left
    if isinstance(p, Snd):
        t = infer(p.pair, hyps, env, _path + (0,))
        if not isinstance(t, And):
            raise fail("snd of a non-conjunction", _path + (0,))
        return t.right
    if isinstance(p, Inl):
        return Or(infer(p.body, hyps, env, _path + (0,)),
                  unfold_normalize(p.right_ann, env))
    if isinstance(p, Inr):
        return Or(unfold_normalize(p.left_ann, env),
                  infer(p.body, hyps, env, _path + (0,)))
    if isinstance(p, Case):
        scrut = infer(p.scrut, hyps, env, _path + (0,))
        if not isinstance(scrut, Or):
            raise fail("case on a non-disjunction", _path + (0,))
        left_hyps = dict(hyps)
        left_hyps[p.binder_l] = scrut.left
        tl = infer(p.body_l, left_hyps, env, _path + (1,))
        right_hyps = dict(hyps)
        right_hyps[p.binder_r] = scrut.right
        tr = infer(p.body_r, right_hyps, env, _path + (2,))
        if tl != tr:
            raise fail("case branches disagree", _path + (2,))
        return tl
    if isinstance(p, ExFalso):
        t = infer(p.body, hyps, env, _path + (0,))
        if not isinstance(t, Bot):
            raise fail("ex falso on a non-absurdity", _path + (0,))
        return unfold_normalize(p.goal_ann, env)
    if isinstance(p, TT):
        return TOP
    if isinstance(p, Inst):
        entry = env.entries.get(p.uri)
        if entry is None or isinstance(entry, Definition):
            raise fail(f"no lemma or axiom at {p.uri}", _path)
        stmt = unfold_normalize(entry.statement, env)
        sigma = p.sigma()
        if set(sigma) != formula_atoms(stmt):
            raise fail(f"substitution does not cover {p.uri}", _path)
        norm_sigma = {k: unfold_normalize(v, env) for k, v in sigma.items()}
        return subst_atoms(stmt, norm_sigma)
    raise fail(f"not a proof term: {type(p).__name__}", _path)


def check(p: ProofTerm, goal: Formula, env: Environment) -> Optional[str]:
    """None on accept, a reject reason otherwise."""
    try:
        inferred = infer(p, {}, env)
    except CheckFailure as e:
        return f"{e.message} at {list(e.path)}"
    if inferred != unfold_normalize(goal, env):
        return "proved statement differs from the goal"
    return None


def match_conclusion(schema: Formula, goal: Formula) -> Optional[dict[str, Formula]]:
    """One-way matching: schema atoms are pattern variables, goal is closed.

    Both sides must be Ref-free (normalized)."""
    sigma: dict[str, Formula] = {}

    def go(s: Formula, g: Formula) -> bool:
        if isinstance(s, Atom):
            bound = sigma.get(s.name)
            if bound is None:
                sigma[s.name] = g
                return True
            return bound == g
        if isinstance(s, Imp) and isinstance(g, Imp):
            return go(s.left, g.left) and go(s.right, g.right)
        if isinstance(s, And) and isinstance(g, And):
            return go(s.left, g.left) and go(s.right, g.right)
        if isinstance(s, Or) and isinstance(g, Or):
            return go(s.left, g.left) and go(s.right, g.right)
        if isinstance(s, Bot) and isinstance(g, Bot):
            return True
        if isinstance(s, Top) and isinstance(g, Top):
            return True
        return False

    if go(schema, goal):
        return sigma
    return None


def strip_premises(f: Formula) -> tuple[list[Formula], Formula]:
    """Split P1 -> ... -> Pn -> C into ([P1..Pn], C) with C not an implication."""
    premises: list[Formula] = []
    while isinstance(f, Imp):
        premises.append(f.left)
        f = f.right
    return premises, f
