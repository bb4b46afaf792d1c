"""Semantic parsing: grammar, wire format, lexicon, optional LLM client."""

from .bundle import (
    TASK_CONTINUOUS_EDITING,
    TASK_GLOBAL,
    TASK_MULTI_REGIONAL,
    PromptBundle,
    serialize,
    validate_document,
)
from .grammar import format_structured, parse_structured
from .lexicon import DEFAULT_LEXICON, expand_abstract, expand_bundle
from .llm import EndpointConfig, UserRequest, config_from_env, llm_decompose

__all__ = [
    "DEFAULT_LEXICON",
    "EndpointConfig",
    "PromptBundle",
    "TASK_CONTINUOUS_EDITING",
    "TASK_GLOBAL",
    "TASK_MULTI_REGIONAL",
    "UserRequest",
    "config_from_env",
    "expand_abstract",
    "expand_bundle",
    "format_structured",
    "llm_decompose",
    "parse_structured",
    "serialize",
    "validate_document",
]
