"""Persistent accounts, per-user script libraries, and a centralized
revisioned shared library with svn-style commit/update semantics
(detect-and-report conflicts, no text merge).

On-disk layout, all UTF-8 with LF line endings:
    store/accounts                 id<TAB>salt-hex<TAB>digest-hex
    store/shared/meta              head line, then rev<TAB>user<TAB>paths
    store/shared/files/...
    store/users/<id>/meta          path<TAB>baserev<TAB>modified:0|1
    store/users/<id>/files/...
"""

from __future__ import annotations

import hashlib
import os
import posixpath
import re
import secrets
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

USER_ID_RE = re.compile(r"^[a-z0-9_]{1,32}$")


class StoreError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code  # access | notfound


@dataclass
class Listing:
    name: str
    kind: str  # file | dir
    modified: bool


@dataclass
class CommitResult:
    revision: Optional[int] = None  # None when nothing to commit
    conflicts: list[str] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.revision is not None and not self.conflicts


@dataclass
class UpdateResult:
    updated: list[str] = field(default_factory=list)
    conflicts: list[str] = field(default_factory=list)


def _normalize(path: str) -> str:
    if not path or path.startswith(("/", "\\")) or "\\" in path:
        raise StoreError("access", f"bad path {path!r}")
    norm = posixpath.normpath(path)
    if norm.startswith("..") or norm == "." or any(
            seg == ".." for seg in norm.split("/")):
        raise StoreError("access", f"path escapes the tree: {path!r}")
    return norm


def _digest(salt: bytes, password: str) -> str:
    return hashlib.sha256(salt + password.encode("utf-8")).hexdigest()


class LibStore:
    """Shared-repo mutations run under a single writer lock; per-user
    working copies are guarded per user."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        (self.root / "shared" / "files").mkdir(parents=True, exist_ok=True)
        (self.root / "users").mkdir(parents=True, exist_ok=True)
        if not (self.root / "accounts").exists():
            (self.root / "accounts").write_text("", encoding="utf-8")
        if not (self.root / "shared" / "meta").exists():
            self._write_shared_meta(0, [])
        self._repo_lock = threading.RLock()
        self._user_locks: dict[str, threading.RLock] = {}
        self._user_locks_guard = threading.Lock()

    # -- accounts ----------------------------------------------------------

    def _accounts(self) -> dict[str, tuple[bytes, str]]:
        out = {}
        for line in (self.root / "accounts").read_text("utf-8").splitlines():
            if line:
                uid, salt, digest = line.split("\t")
                out[uid] = (bytes.fromhex(salt), digest)
        return out

    def create_account(self, user: str, password: str) -> bool:
        """False when the id is already taken."""
        if not USER_ID_RE.match(user):
            raise StoreError("access", f"bad user id {user!r}")
        with self._repo_lock:
            accounts = self._accounts()
            if user in accounts:
                return False
            salt = secrets.token_bytes(16)
            with open(self.root / "accounts", "a", encoding="utf-8",
                      newline="\n") as fh:
                fh.write(f"{user}\t{salt.hex()}\t{_digest(salt, password)}\n")
            self._init_working_copy(user)
        return True

    def verify(self, user: str, password: str) -> bool:
        account = self._accounts().get(user)
        if account is None:
            return False
        salt, digest = account
        return secrets.compare_digest(_digest(salt, password), digest)

    def has_account(self, user: str) -> bool:
        return user in self._accounts()

    # -- shared repo metadata ---------------------------------------------

    def _read_shared_meta(self) -> tuple[int, list[tuple[int, str, list[str]]]]:
        lines = (self.root / "shared" / "meta").read_text("utf-8").splitlines()
        head = int(lines[0].split("\t")[1])
        history = []
        for line in lines[1:]:
            if line:
                rev, user, paths = line.split("\t")
                history.append((int(rev), user,
                                paths.split(",") if paths else []))
        return head, history

    def _write_shared_meta(self, head: int,
                           history: list[tuple[int, str, list[str]]]) -> None:
        lines = [f"head\t{head}"]
        for rev, user, paths in history:
            lines.append(f"{rev}\t{user}\t{','.join(paths)}")
        (self.root / "shared" / "meta").write_text(
            "\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    def _last_changed(self) -> dict[str, int]:
        _, history = self._read_shared_meta()
        out: dict[str, int] = {}
        for rev, _user, paths in history:
            for p in paths:
                out[p] = rev
        return out

    def shared_head(self) -> int:
        with self._repo_lock:
            return self._read_shared_meta()[0]

    def shared_read(self, path: str) -> str:
        path = _normalize(path)
        target = self.root / "shared" / "files" / path
        if not target.is_file():
            raise StoreError("notfound", f"no shared file {path!r}")
        return target.read_text("utf-8")

    def shared_paths(self) -> list[str]:
        base = self.root / "shared" / "files"
        return sorted(str(p.relative_to(base)) for p in base.rglob("*")
                      if p.is_file())

    def seed_shared(self, user: str, files: dict[str, str]) -> int:
        """Directly commit files into the shared repo (bootstrap helper)."""
        with self._repo_lock:
            head, history = self._read_shared_meta()
            head += 1
            paths = []
            for path, content in sorted(files.items()):
                path = _normalize(path)
                target = self.root / "shared" / "files" / path
                target.parent.mkdir(parents=True, exist_ok=True)
                target.write_text(content, encoding="utf-8", newline="\n")
                paths.append(path)
            history.append((head, user, paths))
            self._write_shared_meta(head, history)
            return head

    # -- working copies ----------------------------------------------------

    def _user_lock(self, user: str) -> threading.RLock:
        with self._user_locks_guard:
            return self._user_locks.setdefault(user, threading.RLock())

    def _user_dir(self, user: str) -> Path:
        return self.root / "users" / user

    def _read_user_meta(self, user: str) -> dict[str, tuple[int, bool]]:
        meta = self._user_dir(user) / "meta"
        out = {}
        if meta.exists():
            for line in meta.read_text("utf-8").splitlines():
                if line:
                    path, base, modified = line.split("\t")
                    out[path] = (int(base), modified == "modified:1")
        return out

    def _write_user_meta(self, user: str,
                         entries: dict[str, tuple[int, bool]]) -> None:
        lines = [f"{p}\t{base}\tmodified:{1 if mod else 0}"
                 for p, (base, mod) in sorted(entries.items())]
        (self._user_dir(user) / "meta").write_text(
            "\n".join(lines) + ("\n" if lines else ""),
            encoding="utf-8", newline="\n")

    def _init_working_copy(self, user: str) -> None:
        (self._user_dir(user) / "files").mkdir(parents=True, exist_ok=True)
        head, _ = self._read_shared_meta()
        entries = {}
        for path in self.shared_paths():
            content = self.shared_read(path)
            target = self._user_dir(user) / "files" / path
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(content, encoding="utf-8", newline="\n")
            entries[path] = (head, False)
        self._write_user_meta(user, entries)

    def save(self, user: str, path: str, content: str) -> None:
        path = _normalize(path)
        with self._user_lock(user):
            entries = self._read_user_meta(user)
            target = self._user_dir(user) / "files" / path
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(content, encoding="utf-8", newline="\n")
            base = entries.get(path, (0, False))[0]
            entries[path] = (base, True)
            self._write_user_meta(user, entries)

    def read(self, user: str, path: str) -> str:
        path = _normalize(path)
        with self._user_lock(user):
            target = self._user_dir(user) / "files" / path
            if not target.is_file():
                raise StoreError("notfound", f"no file {path!r}")
            return target.read_text("utf-8")

    def ls(self, user: str, path: str = "") -> list[Listing]:
        norm = _normalize(path) if path else "."
        with self._user_lock(user):
            base = self._user_dir(user) / "files"
            target = base if norm == "." else base / norm
            if not target.is_dir():
                raise StoreError("notfound", f"no directory {path!r}")
            entries = self._read_user_meta(user)
            out = []
            for child in sorted(target.iterdir()):
                rel = str(child.relative_to(base))
                if child.is_dir():
                    out.append(Listing(child.name, "dir", False))
                else:
                    out.append(Listing(child.name, "file",
                                       entries.get(rel, (0, False))[1]))
            return out

    # -- synchronization ---------------------------------------------------

    def commit(self, user: str, paths: Optional[list[str]] = None
               ) -> CommitResult:
        with self._user_lock(user), self._repo_lock:
            entries = self._read_user_meta(user)
            if paths is None:
                targets = sorted(p for p, (_b, mod) in entries.items() if mod)
            else:
                targets = sorted(_normalize(p) for p in paths)
            if not targets:
                return CommitResult()
            head, history = self._read_shared_meta()
            last = self._last_changed()
            conflicts = [p for p in targets
                         if p in last and entries.get(p, (0, False))[0] != last[p]]
            if conflicts:
                return CommitResult(conflicts=conflicts)
            head += 1
            for p in targets:
                content = (self._user_dir(user) / "files" / p).read_text("utf-8")
                target = self.root / "shared" / "files" / p
                target.parent.mkdir(parents=True, exist_ok=True)
                target.write_text(content, encoding="utf-8", newline="\n")
                entries[p] = (head, False)
            history.append((head, user, targets))
            self._write_shared_meta(head, history)
            self._write_user_meta(user, entries)
            return CommitResult(revision=head)

    def update(self, user: str) -> UpdateResult:
        with self._user_lock(user), self._repo_lock:
            entries = self._read_user_meta(user)
            head, _ = self._read_shared_meta()
            last = self._last_changed()
            result = UpdateResult()
            for path, changed_rev in sorted(last.items()):
                base, modified = entries.get(path, (0, False))
                if changed_rev <= base:
                    entries[path] = (head, modified)
                    continue
                if modified:
                    result.conflicts.append(path)
                    continue
                content = self.shared_read(path)
                target = self._user_dir(user) / "files" / path
                target.parent.mkdir(parents=True, exist_ok=True)
                target.write_text(content, encoding="utf-8", newline="\n")
                entries[path] = (head, False)
                result.updated.append(path)
            self._write_user_meta(user, entries)
            return result
