"""Abstract-to-concrete token expansion.

The lexicon maps an abstract style word to a list of concrete engine tokens.
Expansion is positional and single-pass: no recursive rewriting.
"""

from __future__ import annotations

DEFAULT_LEXICON = {
    "festive": ["dots", "red"],
    "calm": ["solid", "blue"],
    "forest": ["solid", "green"],
    "natural": ["solid", "green"],
    "metallic": ["solid", "gray"],
    "striped": ["stripes"],
    "dotted": ["dots"],
    "checkered": ["checker"],
    "fiery": ["stripes", "red"],
    "oceanic": ["checker", "blue"],
}


def expand_abstract(tokens, lexicon=None):
    """Replace abstract tokens with their concrete expansions, in order.

    Unknown tokens pass through unchanged (they are flagged out-of-vocabulary
    downstream, not here).
    """
    table = DEFAULT_LEXICON if lexicon is None else lexicon
    out = []
    for tok in tokens:
        expansion = table.get(tok)
        if expansion is None:
            out.append(tok)
        else:
            out.extend(expansion)
    return out


def expand_bundle(bundle, lexicon=None):
    """Apply expand_abstract to every prompt in a bundle."""
    from .bundle import PromptBundle

    return PromptBundle(
        task=bundle.task,
        character=bundle.character,
        base_prompt=tuple(expand_abstract(bundle.base_prompt, lexicon)),
        regions=tuple(
            (rid, tuple(expand_abstract(tokens, lexicon)))
            for rid, tokens in bundle.regions
        ),
        schema_version=bundle.schema_version,
    )
