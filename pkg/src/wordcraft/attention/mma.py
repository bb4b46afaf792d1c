"""Masked multi-modal attention over the concatenated token sequence.

Disallowed logits are excluded before the softmax (set to -inf), so masked
keys carry exactly zero weight; with an all-ones mask this reduces to plain
dense attention. Logits scale by 1/sqrt(d_k).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import FullyMaskedRow, ShapeMismatch


@dataclass(frozen=True)
class AttentionTensors:
    """Per-head query/key/value stacks: shape (heads, S, d_k)."""

    q: np.ndarray
    k: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        q, k, v = (np.asarray(t, dtype=np.float64) for t in (self.q, self.k, self.v))
        if q.ndim == 2:
            q, k, v = q[None], k[None], v[None]
        if not (q.shape == k.shape == v.shape) or q.ndim != 3:
            raise ShapeMismatch(
                f"q/k/v must share shape (h, S, d_k): {q.shape} {k.shape} {v.shape}")
        if q.shape[2] < 1:
            raise ShapeMismatch("d_k must be >= 1")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "v", v)

    @property
    def heads(self):
        return self.q.shape[0]

    @property
    def seq_len(self):
        return self.q.shape[1]

    @property
    def d_k(self):
        return self.q.shape[2]


def masked_weights(q, k, mask_matrix):
    """Post-softmax attention weights with masked keys at exactly zero."""
    d_k = q.shape[-1]
    logits = q @ np.swapaxes(k, -1, -2) / np.sqrt(d_k)
    logits = np.where(mask_matrix, logits, -np.inf)
    logits = logits - logits.max(axis=-1, keepdims=True)
    w = np.exp(logits)
    return w / w.sum(axis=-1, keepdims=True)


def masked_mma(tensors, mask):
    """Masked attention output per head: (heads, S, d_k)."""
    m = mask.matrix if hasattr(mask, "matrix") else np.asarray(mask, dtype=bool)
    if m.shape != (tensors.seq_len, tensors.seq_len):
        raise ShapeMismatch(
            f"mask {m.shape} does not match sequence length {tensors.seq_len}")
    if not m.any(axis=1).all():
        raise FullyMaskedRow("mask has a query row with no allowed key")
    w = masked_weights(tensors.q, tensors.k, m[None, :, :])
    return w @ tensors.v


def dense_attention_reference(q, k, v):
    """Independent dense softmax attention used as the degeneration oracle.

    Deliberately written with explicit einsum steps rather than the masked
    code path.
    """
    q, k, v = (np.asarray(t, dtype=np.float64) for t in (q, k, v))
    if q.ndim == 2:
        q, k, v = q[None], k[None], v[None]
    scores = np.einsum("hid,hjd->hij", q, k) / np.sqrt(q.shape[-1])
    scores -= scores.max(axis=-1, keepdims=True)
    e = np.exp(scores)
    weights = e / e.sum(axis=-1, keepdims=True)
    return np.einsum("hij,hjd->hid", weights, v)
