"""Rewriting of executed statement text with mechanically generated markup:
hyperlinks from resolutions and trace wrappers from successful automation.

Insertions are applied right to left by offset so earlier spans stay valid;
already-wrapped tokens are left untouched, which makes enrichment
idempotent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .kernel import LibUri
from .scriptlang import Token
from .tactics import AutoTrace


class MarkupError(Exception):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset


@dataclass(frozen=True)
class EnrichedStatement:
    text: str
    original_span: tuple[int, int]  # (offset, length) in the submitted text
    enriched_length: int            # Unicode scalars of text


def _already_linked(raw: str, start: int, end: int, uri: LibUri) -> bool:
    opener = f'<A href="{uri}">'
    return (raw[:start].endswith(opener) and raw[end:].startswith("</A>"))


def enrich(raw: str, raw_start: int, resolution: dict[int, LibUri],
           tokens: list[Token], trace: Optional[AutoTrace] = None,
           trace_lemma_names: Optional[dict[LibUri, str]] = None,
           auto_tok: Optional[int] = None) -> EnrichedStatement:
    """Wrap resolved leaves in hyperlinks and, for a successful untraced
    auto, insert the trace arguments after the auto lexeme.

    raw is the statement's source slice and raw_start its offset in the
    submitted text; token spans are absolute, so raw_start rebases them.
    """
    # (absolute position in raw, inserted text) or (start, end, wrapped)
    insertions: list[tuple[int, int, str]] = []

    for tok_index in sorted(resolution):
        if tok_index >= len(tokens):
            raise MarkupError("resolution references a missing token", 0)
        tok = tokens[tok_index]
        start = tok.span[0] - raw_start
        end = tok.span[1] - raw_start
        if not (0 <= start <= end <= len(raw)) or raw[start:end] != tok.lexeme:
            raise MarkupError("resolution token does not appear in raw text",
                              max(start, 0))
        uri = resolution[tok_index]
        if _already_linked(raw, start, end, uri):
            continue
        insertions.append(
            (start, end, f'<A href="{uri}">{tok.lexeme}</A>'))

    if trace is not None:
        if auto_tok is None:
            raise MarkupError("trace without an auto token", 0)
        tok = tokens[auto_tok]
        pos = tok.span[1] - raw_start
        names = trace_lemma_names or {}
        parts = []
        if trace.lemmas:
            shown = ", ".join(
                f'<A href="{u}">{names.get(u, u.name)}</A>' for u in trace.lemmas)
            parts.append(f"using {shown}")
        parts.append(f"depth {trace.depth}")
        insertions.append((pos, pos, f"<T> {' '.join(parts)}</T>"))

    out = raw
    for start, end, repl in sorted(insertions, reverse=True):
        out = out[:start] + repl + out[end:]
    return EnrichedStatement(out, (raw_start, len(raw)), len(out))


def strip(text: str) -> str:
    """Remove markup tag pairs, keeping the wrapped content; comments are
    left untouched."""
    out: list[str] = []
    pos = 0
    n = len(text)
    stack: list[tuple[str, int]] = []
    while pos < n:
        c = text[pos]
        if text.startswith("(*", pos):
            depth = 1
            j = pos + 2
            while j < n and depth:
                if text.startswith("(*", j):
                    depth += 1
                    j += 2
                elif text.startswith("*)", j):
                    depth -= 1
                    j += 2
                else:
                    j += 1
            if depth:
                raise MarkupError("unterminated comment", pos)
            out.append(text[pos:j])
            pos = j
            continue
        if c == "<":
            if text.startswith("</A>", pos) or text.startswith("</T>", pos):
                tag = text[pos + 2]
                if not stack or stack[-1][0] != tag:
                    raise MarkupError(f"unbalanced </{tag}>", pos)
                stack.pop()
                pos += 4
                continue
            if text.startswith("<T>", pos):
                stack.append(("T", pos))
                pos += 3
                continue
            j = text.find(">", pos)
            if text.startswith("<A href=", pos) and j >= 0:
                stack.append(("A", pos))
                pos = j + 1
                continue
            raise MarkupError("ill-formed markup tag", pos)
        out.append(c)
        pos += 1
    if stack:
        raise MarkupError(f"unbalanced <{stack[-1][0]}>", stack[-1][1])
    return "".join(out)
