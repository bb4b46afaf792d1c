"""Deterministic mini-language for structured requests.

    char "W" ; task regions ; base: solid gray ; region 1: stripes red

Directives are separated by `;`, may appear in any order, and are
whitespace-insensitive. Task names map onto the wire-format task types:
global -> global, regions -> multi_regional, edit -> continuous_editing.
"""

from __future__ import annotations

import re

from ..errors import DuplicateRegion, MissingBase, PromptSyntaxError, RegionOnGlobal
from .bundle import (
    TASK_CONTINUOUS_EDITING,
    TASK_GLOBAL,
    TASK_MULTI_REGIONAL,
    PromptBundle,
)

_TASK_NAMES = {
    "global": TASK_GLOBAL,
    "regions": TASK_MULTI_REGIONAL,
    "edit": TASK_CONTINUOUS_EDITING,
}
_TASK_WORDS = {v: k for k, v in _TASK_NAMES.items()}

_CHAR_RE = re.compile(r'^char\s*"([^"]*)"\s*$')
_TASK_RE = re.compile(r"^task\s+(\S+)\s*$")
_BASE_RE = re.compile(r"^base\s*:\s*(.*)$", re.S)
_REGION_RE = re.compile(r"^region\s+(\d+)\s*:\s*(.*)$", re.S)


def parse_structured(text):
    """Parse the mini-language into a validated PromptBundle."""
    if not isinstance(text, str) or not text.strip():
        raise PromptSyntaxError("empty request", position=0,
                                expected='char "<c>"')
    character = None
    task = None
    base = None
    regions = {}
    order = []

    pos = 0
    for segment in text.split(";"):
        seg_start = pos
        pos += len(segment) + 1
        stripped = segment.strip()
        if not stripped:
            continue
        at = seg_start + segment.index(stripped[0])

        m = _CHAR_RE.match(stripped)
        if m:
            if character is not None:
                raise PromptSyntaxError("duplicate 'char' directive", position=at,
                                        expected="a single char directive")
            character = m.group(1)
            if not character:
                raise PromptSyntaxError("empty character", position=at,
                                        expected="one or more characters")
            continue
        m = _TASK_RE.match(stripped)
        if m:
            if task is not None:
                raise PromptSyntaxError("duplicate 'task' directive", position=at,
                                        expected="a single task directive")
            word = m.group(1)
            if word not in _TASK_NAMES:
                raise PromptSyntaxError(
                    f"unknown task {word!r}", position=at,
                    expected="global | regions | edit")
            task = _TASK_NAMES[word]
            continue
        m = _BASE_RE.match(stripped)
        if m:
            if base is not None:
                raise PromptSyntaxError("duplicate 'base' directive", position=at,
                                        expected="a single base directive")
            base = tuple(m.group(1).split())
            if not base:
                raise PromptSyntaxError("empty base prompt", position=at,
                                        expected="one or more tokens")
            continue
        m = _REGION_RE.match(stripped)
        if m:
            rid = int(m.group(1))
            if rid in regions:
                raise DuplicateRegion(f"region {rid} declared twice")
            tokens = tuple(m.group(2).split())
            if not tokens:
                raise PromptSyntaxError(f"empty prompt for region {rid}",
                                        position=at, expected="one or more tokens")
            regions[rid] = tokens
            order.append(rid)
            continue
        raise PromptSyntaxError(
            f"unrecognized directive {stripped.split()[0]!r}", position=at,
            expected="char | task | base | region")

    if character is None:
        raise PromptSyntaxError("missing 'char' directive", position=len(text),
                                expected='char "<c>"')
    if task is None:
        raise PromptSyntaxError("missing 'task' directive", position=len(text),
                                expected="task global | regions | edit")
    if task == TASK_GLOBAL and regions:
        raise RegionOnGlobal("region directives are not allowed with task global")
    if task in (TASK_GLOBAL, TASK_MULTI_REGIONAL) and base is None:
        raise MissingBase(f"task {_TASK_WORDS[task]} requires a base directive")

    ids = sorted(regions)
    if ids != list(range(1, len(ids) + 1)):
        raise PromptSyntaxError(
            f"region ids must be contiguous from 1, got {ids}",
            position=len(text), expected="region ids 1..N")

    return PromptBundle(
        task=task,
        character=character,
        base_prompt=base or (),
        regions=tuple((rid, regions[rid]) for rid in sorted(regions)),
    )


def format_structured(bundle):
    """Render a bundle back into the mini-language (inverse of parse)."""
    parts = [f'char "{bundle.character}"', f"task {_TASK_WORDS[bundle.task]}"]
    if bundle.base_prompt:
        parts.append("base: " + " ".join(bundle.base_prompt))
    for rid, tokens in bundle.regions:
        parts.append(f"region {rid}: " + " ".join(tokens))
    return " ; ".join(parts)
