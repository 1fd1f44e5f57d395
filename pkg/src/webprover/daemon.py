"""HTTP daemon exposing the prover as CGI-style endpoints under /matita/
that return XML documents.

The handler core is a pure-ish object (request in, XML bytes out) so the
protocol can be golden-tested without sockets; a thin http.server wrapper
provides the actual network face. Parameters travel as query parameters,
script text and file content as the raw request body.
"""

from __future__ import annotations

import argparse
import secrets
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Optional
from urllib.parse import parse_qs, urlsplit

from . import stdlib
from .executor import (ExecResult, Session, current_goals, execute,
                       new_session, undo)
from .kernel import Environment
from .libstore import LibStore, StoreError
from .tactics import Goal
from .scriptlang import render_formula

MAX_BODY = 1 << 20  # 1 MiB
TOKEN_IDLE_SECONDS = 120 * 60

PASSWORD_MIN = 8


def xml_escape(s: str) -> str:
    return (s.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def cdata(s: str) -> str:
    # "]]>" cannot appear verbatim inside a CDATA section
    return "<![CDATA[" + s.replace("]]>", "]]]]><![CDATA[>") + "]]>"


@dataclass
class Response:
    status: int
    body: bytes

    @staticmethod
    def xml(status: int, inner: str) -> "Response":
        doc = f"<response>{inner}</response>\n"
        return Response(status, doc.encode("utf-8"))


def _error(code: str, message: str = "", offset: int = 0, length: int = 0,
           status: int = 200) -> Response:
    attrs = f'code="{code}" offset="{offset}" length="{length}"'
    return Response.xml(status, f"<error {attrs}>{xml_escape(message)}</error>")


def _goals_xml(goals: list[Goal]) -> str:
    parts = [f'<goals count="{len(goals)}">']
    for i, g in enumerate(goals):
        parts.append(f'<goal index="{i}">')
        for name, f in g.hyps:
            parts.append(f'<hyp name="{xml_escape(name)}">'
                         f"{xml_escape(render_formula(f))}</hyp>")
        parts.append(f"<concl>{xml_escape(render_formula(g.concl))}</concl>")
        parts.append("</goal>")
    parts.append("</goals>")
    return "".join(parts)


def _exec_xml(result: ExecResult) -> str:
    parts = [f'<executed chars="{result.consumed}" '
             f'statements="{len(result.statements)}"/>']
    for i, st in enumerate(result.statements):
        parts.append(f'<statement index="{i}" chars="{st.enriched_length}">'
                     f"{cdata(st.text)}</statement>")
    parts.append(_goals_xml(result.goals))
    if result.error is not None:
        e = result.error
        parts.append(f'<error code="{e.code}" offset="{e.offset}" '
                     f'length="{e.length}">{xml_escape(e.message)}</error>')
    if result.choices is not None:
        c = result.choices
        parts.append(f'<choices lexeme="{xml_escape(c.lexeme)}" '
                     f'offset="{c.offset}" length="{c.length}">')
        for cand in c.candidates:
            parts.append(f'<candidate uri="{xml_escape(str(cand.uri))}" '
                         f'kind="{cand.kind}">'
                         f"<display>{xml_escape(cand.display)}</display>"
                         f"</candidate>")
        parts.append("</choices>")
    return "".join(parts)


@dataclass
class _SessionSlot:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)


class Daemon:
    """Protocol core: routes one request to one XML response."""

    def __init__(self, store: LibStore, base_env: Optional[Environment] = None,
                 clock: Callable[[], float] = time.monotonic):
        self.store = store
        self.clock = clock
        if not store.shared_paths():
            store.seed_shared("shared", stdlib.SHARED_FILES)
        self.base_env = base_env if base_env is not None else stdlib.shared_env()
        self._lock = threading.Lock()
        self._tokens: dict[str, tuple[str, float]] = {}  # token -> (user, last)
        self._sessions: dict[tuple[str, str], _SessionSlot] = {}
        self._session_seq = 0

    # -- auth --------------------------------------------------------------

    def _issue_token(self, user: str) -> str:
        token = secrets.token_hex(16)
        with self._lock:
            self._tokens[token] = (user, self.clock())
        return token

    def _auth(self, query: dict[str, str]) -> Optional[str]:
        token = query.get("token", "")
        with self._lock:
            entry = self._tokens.get(token)
            if entry is None:
                return None
            user, last = entry
            if self.clock() - last > TOKEN_IDLE_SECONDS:
                del self._tokens[token]
                self._drop_sessions(token)
                return None
            self._tokens[token] = (user, self.clock())
            return user

    def _drop_sessions(self, token: str) -> None:
        for key in [k for k in self._sessions if k[0] == token]:
            del self._sessions[key]

    # -- routing -----------------------------------------------------------

    def handle(self, method: str, path: str, query: dict[str, str],
               body: str) -> Response:
        if len(body.encode("utf-8")) > MAX_BODY:
            return _error("toolarge", "request body exceeds 1 MiB")
        route = (method, path)
        if route == ("POST", "/matita/register"):
            return self._register(query)
        if route == ("POST", "/matita/login"):
            return self._login(query)
        user = self._auth(query)
        if user is None:
            return _error("auth", "missing or invalid token", status=401)
        if route == ("POST", "/matita/logout"):
            with self._lock:
                self._tokens.pop(query.get("token", ""), None)
                self._drop_sessions(query.get("token", ""))
            return Response.xml(200, "<ok/>")
        if route == ("POST", "/matita/session/new"):
            return self._session_new(query)
        if route == ("POST", "/matita/execute"):
            return self._execute(user, query, body)
        if route == ("POST", "/matita/undo"):
            return self._undo(query)
        if route == ("GET", "/matita/goals"):
            return self._goals(query)
        if route == ("GET", "/matita/ls"):
            return self._fs(lambda: self._ls(user, query))
        if route == ("GET", "/matita/read"):
            return self._fs(lambda: self._read(user, query))
        if route == ("POST", "/matita/save"):
            return self._fs(lambda: self._save(user, query, body))
        if route == ("POST", "/matita/commit"):
            return self._fs(lambda: self._commit(user))
        if route == ("POST", "/matita/update"):
            return self._fs(lambda: self._update(user))
        return _error("notfound", f"no endpoint {method} {path}", status=404)

    # -- account endpoints -------------------------------------------------

    def _register(self, query: dict[str, str]) -> Response:
        user = query.get("user", "")
        password = query.get("password", "")
        if len(password) < PASSWORD_MIN:
            return _error("validation", "password must have at least 8 characters")
        try:
            created = self.store.create_account(user, password)
        except StoreError as e:
            return _error("validation", str(e))
        if not created:
            return _error("taken", f"user id {user!r} is taken")
        return Response.xml(200, f'<registered user="{xml_escape(user)}"/>')

    def _login(self, query: dict[str, str]) -> Response:
        user = query.get("user", "")
        password = query.get("password", "")
        if not self.store.verify(user, password):
            return _error("auth", "bad credentials", status=401)
        token = self._issue_token(user)
        return Response.xml(200, f'<token value="{token}"/>')

    # -- prover endpoints --------------------------------------------------

    def _session_new(self, query: dict[str, str]) -> Response:
        token = query.get("token", "")
        with self._lock:
            self._session_seq += 1
            sid = f"s{self._session_seq}"
            user = self._tokens[token][0]
            session = new_session(sid, user, self.base_env)
            self._sessions[(token, sid)] = _SessionSlot(session)
        return Response.xml(200, f'<session id="{sid}"/>')

    def _slot(self, query: dict[str, str]) -> Optional[_SessionSlot]:
        key = (query.get("token", ""), query.get("session", ""))
        with self._lock:
            return self._sessions.get(key)

    def _execute(self, user: str, query: dict[str, str], body: str) -> Response:
        slot = self._slot(query)
        if slot is None:
            return _error("notfound", "no such session")
        mode = query.get("mode", "all")
        if mode not in ("one", "all"):
            return _error("validation", f"bad mode {mode!r}")
        if not slot.lock.acquire(blocking=False):
            return _error("busy", "another call is in flight on this session")
        try:
            result = execute(slot.session, body, mode)
        finally:
            slot.lock.release()
        return Response.xml(200, _exec_xml(result))

    def _undo(self, query: dict[str, str]) -> Response:
        slot = self._slot(query)
        if slot is None:
            return _error("notfound", "no such session")
        steps = query.get("steps", "1")
        if steps != "all":
            try:
                if int(steps) < 1:
                    raise ValueError
            except ValueError:
                return _error("validation", f"bad steps {steps!r}")
        if not slot.lock.acquire(blocking=False):
            return _error("busy", "another call is in flight on this session")
        try:
            before = len(slot.session.history)
            remaining, goals = undo(slot.session,
                                    steps if steps == "all" else int(steps))
        finally:
            slot.lock.release()
        inner = (f'<undone steps="{before - remaining}" '
                 f'remaining="{remaining}"/>' + _goals_xml(goals))
        return Response.xml(200, inner)

    def _goals(self, query: dict[str, str]) -> Response:
        slot = self._slot(query)
        if slot is None:
            return _error("notfound", "no such session")
        return Response.xml(200, _goals_xml(current_goals(slot.session)))

    # -- file system and sync ----------------------------------------------

    def _fs(self, fn: Callable[[], Response]) -> Response:
        try:
            return fn()
        except StoreError as e:
            code = "notfound" if e.code == "notfound" else "auth"
            return _error(code, str(e))

    def _ls(self, user: str, query: dict[str, str]) -> Response:
        listing = self.store.ls(user, query.get("path", ""))
        parts = ["<listing>"]
        for entry in listing:
            parts.append(f'<entry name="{xml_escape(entry.name)}" '
                         f'kind="{entry.kind}" '
                         f'modified="{1 if entry.modified else 0}"/>')
        parts.append("</listing>")
        return Response.xml(200, "".join(parts))

    def _read(self, user: str, query: dict[str, str]) -> Response:
        path = query.get("file", "")
        content = self.store.read(user, path)
        return Response.xml(
            200, f'<file path="{xml_escape(path)}">{cdata(content)}</file>')

    def _save(self, user: str, query: dict[str, str], body: str) -> Response:
        path = query.get("file", "")
        self.store.save(user, path, body)
        return Response.xml(200, f'<saved path="{xml_escape(path)}"/>')

    def _commit(self, user: str) -> Response:
        result = self.store.commit(user)
        if result.conflicts:
            inner = "".join(f"<path>{xml_escape(p)}</path>"
                            for p in result.conflicts)
            return Response.xml(200, f"<conflicts>{inner}</conflicts>")
        if result.revision is None:
            return Response.xml(200, "<uptodate/>")
        return Response.xml(200, f'<committed revision="{result.revision}"/>')

    def _update(self, user: str) -> Response:
        result = self.store.update(user)
        updated = "".join(f"<path>{xml_escape(p)}</path>"
                          for p in result.updated)
        conflicts = "".join(f"<path>{xml_escape(p)}</path>"
                            for p in result.conflicts)
        return Response.xml(
            200, f"<updated>{updated}</updated><conflicts>{conflicts}</conflicts>")


# ---------------------------------------------------------------------------
# HTTP wrapper

def make_server(daemon: Daemon, host: str = "127.0.0.1",
                port: int = 8090) -> ThreadingHTTPServer:
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def _run(self, method: str) -> None:
            parts = urlsplit(self.path)
            query = {k: v[0] for k, v in parse_qs(parts.query).items()}
            length = int(self.headers.get("Content-Length") or 0)
            if length > MAX_BODY:
                body_bytes = self.rfile.read(length)  # drain
                response = _error("toolarge", "request body exceeds 1 MiB")
            else:
                body_bytes = self.rfile.read(length) if length else b""
                try:
                    body = body_bytes.decode("utf-8")
                except UnicodeDecodeError:
                    response = _error("validation", "body is not valid UTF-8")
                else:
                    response = daemon.handle(method, parts.path, query, body)
            payload = response.body
            self.send_response(response.status)
            self.send_header("Content-Type", "application/xml; charset=utf-8")
            self.send_header("Content-Length", str(len(payload)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(payload)

        def do_GET(self) -> None:
            self._run("GET")

        def do_POST(self) -> None:
            self._run("POST")

        def log_message(self, fmt: str, *args) -> None:
            pass  # quiet by default

    return ThreadingHTTPServer((host, port), Handler)


def main(argv: Optional[list[str]] = None) -> None:
    parser = argparse.ArgumentParser(description="webprover daemon")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8090)
    parser.add_argument("--store", default="store")
    args = parser.parse_args(argv)
    daemon = Daemon(LibStore(args.store))
    server = make_server(daemon, args.host, args.port)
    print(f"webprover daemon listening on http://{args.host}:{args.port}/matita/",
          flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass


if __name__ == "__main__":
    main()
