"""Structured prompt document: the bundle type, JSON wire format, validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..errors import SchemaViolation

SCHEMA_VERSION = 1

TASK_GLOBAL = "global"
TASK_MULTI_REGIONAL = "multi_regional"
TASK_CONTINUOUS_EDITING = "continuous_editing"
TASKS = (TASK_GLOBAL, TASK_MULTI_REGIONAL, TASK_CONTINUOUS_EDITING)

_TOP_FIELDS = {"schema_version", "task", "character", "base_prompt", "regions"}
_REGION_FIELDS = {"id", "prompt"}


@dataclass(frozen=True)
class PromptBundle:
    """Parsed task document: task type, target character(s), prompts.

    regions is an ordered list of (region_id, token list) with ids contiguous
    from 1. Global tasks carry no regions; continuous editing carries no base
    prompt.
    """

    task: str
    character: str
    base_prompt: tuple = ()
    regions: tuple = field(default_factory=tuple)
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        object.__setattr__(self, "base_prompt", tuple(self.base_prompt))
        object.__setattr__(
            self, "regions",
            tuple((int(rid), tuple(tokens)) for rid, tokens in self.regions))
        _check_bundle(self)

    @property
    def region_count(self):
        return len(self.regions)

    @property
    def region_prompts(self):
        return [list(tokens) for _, tokens in self.regions]

    def out_of_vocabulary(self, vocabulary):
        """Tokens not known to the engine vocabulary, in order of appearance."""
        known = set(vocabulary)
        seen = []
        for tok in list(self.base_prompt) + [t for _, ts in self.regions for t in ts]:
            if tok not in known and tok not in seen:
                seen.append(tok)
        return seen


def _check_bundle(b):
    if b.schema_version != SCHEMA_VERSION:
        raise SchemaViolation("schema_version", f"expected {SCHEMA_VERSION}")
    if b.task not in TASKS:
        raise SchemaViolation("task", f"unknown task {b.task!r}")
    if not b.character:
        raise SchemaViolation("character", "must be non-empty")
    if b.task == TASK_GLOBAL and b.regions:
        raise SchemaViolation("regions", "global task takes no regions")
    if b.task in (TASK_GLOBAL, TASK_MULTI_REGIONAL) and not b.base_prompt:
        raise SchemaViolation("base_prompt", f"{b.task} task requires a base prompt")
    if b.task == TASK_CONTINUOUS_EDITING and b.base_prompt:
        raise SchemaViolation("base_prompt", "continuous_editing takes no base prompt")
    if b.task in (TASK_MULTI_REGIONAL, TASK_CONTINUOUS_EDITING) and not b.regions:
        raise SchemaViolation("regions", f"{b.task} task requires regions")
    ids = [rid for rid, _ in b.regions]
    if ids != list(range(1, len(ids) + 1)):
        raise SchemaViolation("regions", f"ids must be contiguous from 1, got {ids}")
    for rid, tokens in b.regions:
        if not tokens:
            raise SchemaViolation(f"regions[{rid}].prompt", "must be non-empty")
        for t in tokens:
            if not isinstance(t, str) or not t:
                raise SchemaViolation(f"regions[{rid}].prompt", "tokens must be non-empty strings")
    for t in b.base_prompt:
        if not isinstance(t, str) or not t:
            raise SchemaViolation("base_prompt", "tokens must be non-empty strings")


def serialize(bundle):
    """Canonical JSON document for a bundle (field order is normative)."""
    doc = {"schema_version": bundle.schema_version, "task": bundle.task,
           "character": bundle.character}
    if bundle.task in (TASK_GLOBAL, TASK_MULTI_REGIONAL):
        doc["base_prompt"] = list(bundle.base_prompt)
    if bundle.task in (TASK_MULTI_REGIONAL, TASK_CONTINUOUS_EDITING):
        doc["regions"] = [
            {"id": rid, "prompt": list(tokens)} for rid, tokens in bundle.regions
        ]
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":"))


def validate_document(doc):
    """Validate a wire-format JSON document and build the bundle.

    Accepts a JSON string or an already-decoded dict. Unknown fields are
    rejected with the offending path.
    """
    if isinstance(doc, (str, bytes)):
        try:
            data = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise SchemaViolation("$", f"not valid JSON: {exc}") from exc
    else:
        data = doc
    if not isinstance(data, dict):
        raise SchemaViolation("$", "document must be a JSON object")
    unknown = set(data) - _TOP_FIELDS
    if unknown:
        raise SchemaViolation(sorted(unknown)[0], "unknown field")
    for required in ("schema_version", "task", "character"):
        if required not in data:
            raise SchemaViolation(required, "missing")
    task = data["task"]
    if task not in TASKS:
        raise SchemaViolation("task", f"unknown task {task!r}")
    if not isinstance(data["character"], str):
        raise SchemaViolation("character", "must be a string")
    if not isinstance(data["schema_version"], int):
        raise SchemaViolation("schema_version", "must be an integer")

    if task == TASK_GLOBAL and "regions" in data:
        raise SchemaViolation("regions", "not allowed for global task")
    if task == TASK_CONTINUOUS_EDITING and "base_prompt" in data:
        raise SchemaViolation("base_prompt", "not allowed for continuous_editing task")

    base = data.get("base_prompt", [])
    if not isinstance(base, list) or not all(isinstance(t, str) for t in base):
        raise SchemaViolation("base_prompt", "must be a list of strings")

    regions = []
    raw_regions = data.get("regions", [])
    if not isinstance(raw_regions, list):
        raise SchemaViolation("regions", "must be a list")
    seen_ids = set()
    for i, entry in enumerate(raw_regions):
        path = f"regions[{i}]"
        if not isinstance(entry, dict):
            raise SchemaViolation(path, "must be an object")
        unknown = set(entry) - _REGION_FIELDS
        if unknown:
            raise SchemaViolation(f"{path}.{sorted(unknown)[0]}", "unknown field")
        if "id" not in entry or "prompt" not in entry:
            raise SchemaViolation(path, "needs id and prompt")
        rid = entry["id"]
        if not isinstance(rid, int) or rid < 1:
            raise SchemaViolation(f"{path}.id", "must be an integer >= 1")
        if rid in seen_ids:
            raise SchemaViolation(f"{path}.id", f"duplicate region id {rid}")
        seen_ids.add(rid)
        prompt = entry["prompt"]
        if not isinstance(prompt, list) or not all(isinstance(t, str) for t in prompt):
            raise SchemaViolation(f"{path}.prompt", "must be a list of strings")
        regions.append((rid, tuple(prompt)))
    if sorted(seen_ids) != list(range(1, len(seen_ids) + 1)):
        raise SchemaViolation("regions", f"ids must be contiguous from 1, got {sorted(seen_ids)}")
    regions.sort(key=lambda r: r[0])

    try:
        return PromptBundle(
            task=task,
            character=data["character"],
            base_prompt=tuple(base),
            regions=tuple(regions),
            schema_version=data["schema_version"],
        )
    except SchemaViolation:
        raise
