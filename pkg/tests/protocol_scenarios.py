"""Fixed request sequences for the protocol golden tests.

The same driver produces the stored goldens (python3 -m tests.golden_gen)
and the live responses compared against them, so any byte-level drift in
the XML surface shows up as a diff.
"""

from __future__ import annotations

import itertools

import webprover.daemon as daemon_mod
from webprover.daemon import Daemon
from webprover.libstore import LibStore


def deterministic_tokens() -> None:
    """Replace token generation with a predictable counter (tests only)."""
    counter = itertools.count(1)
    daemon_mod.secrets = _FixedSecrets(counter)


class _FixedSecrets:
    def __init__(self, counter):
        self._counter = counter

    def token_hex(self, n: int) -> str:
        return f"{next(self._counter):0{2 * n}d}"


def build_daemon(store_root) -> Daemon:
    return Daemon(LibStore(store_root), clock=lambda: 0.0)


def run_scenarios(daemon: Daemon) -> list[tuple[str, bytes]]:
    """Returns (scenario name, raw response body) pairs, in replay order."""
    out: list[tuple[str, bytes]] = []

    def call(method, path, query, body=""):
        return daemon.handle(method, path, query, body)

    call("POST", "/matita/register",
         {"user": "alice", "password": "correcthorse"})
    token = "0" * 31 + "1"
    call("POST", "/matita/login", {"user": "alice", "password": "correcthorse"})
    call("POST", "/matita/session/new", {"token": token})

    r = call("POST", "/matita/execute",
             {"token": token, "session": "s1", "mode": "all"},
             "theorem tfour : pa → pb → pa ∧ pb.\nintro H.\nauto.\nqed.\n")
    out.append(("four_statement_run", r.body))

    call("POST", "/matita/session/new", {"token": token})
    r = call("POST", "/matita/execute",
             {"token": token, "session": "s2", "mode": "all"},
             "theorem amb : swapped → swapped.")
    out.append(("ambiguity", r.body))

    r = call("POST", "/matita/execute",
             {"token": "deadbeef", "session": "s1"}, "qed.")
    out.append(("auth_failure", r.body))

    call("POST", "/matita/register",
         {"user": "bob", "password": "correcthorse"})
    bob = "0" * 31 + "2"
    call("POST", "/matita/login", {"user": "bob", "password": "correcthorse"})
    call("POST", "/matita/save", {"token": token, "file": "logic.ma"},
         "axiom alpha : zq.\n")
    call("POST", "/matita/commit", {"token": token})
    call("POST", "/matita/save", {"token": bob, "file": "logic.ma"},
         "axiom beta : zq.\n")
    r = call("POST", "/matita/commit", {"token": bob})
    out.append(("commit_conflict", r.body))

    return out
