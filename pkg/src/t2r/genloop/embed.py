"""Instruction embedding backends.

Default is dependency-free character 3-gram feature hashing (signed, 256
buckets, L2-normalized): identical text always embeds to the identical unit
vector. An HTTP backend can be plugged in for a real sentence-embedding
service.
"""

from __future__ import annotations

import hashlib
import os

import numpy as np

DEFAULT_DIM = 256


class EmbedderUnavailable(Exception):
    pass


def _grams(text: str) -> list[str]:
    if len(text) < 3:
        text = f" {text} "
    return [text[i : i + 3] for i in range(len(text) - 2)]


def embed(text: str, dim: int = DEFAULT_DIM) -> np.ndarray:
    """Unit-norm hashed 3-gram embedding; deterministic across processes
    (hashlib, not the salted builtin hash)."""
    if not text:
        raise ValueError("cannot embed empty text")
    v = np.zeros(dim, dtype=np.float64)
    for gram in _grams(text):
        digest = hashlib.sha256(gram.encode("utf-8")).digest()
        bucket = int.from_bytes(digest[:8], "big")
        sign = 1.0 if digest[8] & 1 == 0 else -1.0
        v[bucket % dim] += sign
    n = np.linalg.norm(v)
    if n == 0.0:
        v[0] = 1.0
        return v
    return v / n


class HashingEmbedder:
    def __init__(self, dim: int = DEFAULT_DIM):
        self.dim = dim

    def __call__(self, text: str) -> np.ndarray:
        return embed(text, self.dim)


class HttpEmbedder:
    """POSTs {"input": text} to an embedding service and L2-normalizes the
    returned vector. Endpoint from T2R_EMBED_ENDPOINT unless given."""

    def __init__(self, endpoint: str | None = None, timeout: float = 30.0):
        self.endpoint = endpoint or os.environ.get("T2R_EMBED_ENDPOINT", "")
        self.timeout = timeout

    def __call__(self, text: str) -> np.ndarray:
        if not self.endpoint:
            raise EmbedderUnavailable("no embedding endpoint configured (T2R_EMBED_ENDPOINT)")
        import requests

        try:
            resp = requests.post(self.endpoint, json={"input": text}, timeout=self.timeout)
            resp.raise_for_status()
            vec = np.asarray(resp.json()["embedding"], dtype=np.float64)
        except Exception as exc:  # noqa: BLE001 - network failures collapse to one category
            raise EmbedderUnavailable(f"embedding service failed: {exc}") from exc
        n = np.linalg.norm(vec)
        if n == 0.0:
            raise EmbedderUnavailable("embedding service returned a zero vector")
        return vec / n
