"""Text embedding providers, on-disk caching, and cosine similarity.

Two providers sit behind one config surface: a deterministic character-3-gram
feature hasher (fully offline, identical vectors across processes) and a
remote HTTP provider speaking ``POST /embed``. All vectors are L2-normalized
float64 of a fixed dimension.
"""

from __future__ import annotations

import hashlib
import os
import re
import threading
import unicodedata
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import requests

from ttl.errors import DataError, TransportError

EmbeddingVector = np.ndarray

# Fixed 64-bit seed for the feature hasher; part of the vector contract, so
# changing it invalidates every cache and recorded fixture.
HASH_SEED = 0x9E3779B97F4A7C15

_WS_RE = re.compile(r"\s+")


class EmptyTextError(DataError):
    """A text is empty after normalization."""


class DimensionMismatchError(DataError):
    """Vectors of different dimensions were combined."""


class ProviderUnavailableError(TransportError):
    """The remote embedding endpoint is unreachable or returned non-200."""


def normalize_text(raw: str) -> str:
    """Canonicalize text: Unicode NFC, collapse whitespace, trim, lowercase."""
    return _WS_RE.sub(" ", unicodedata.normalize("NFC", raw)).strip().lower()


@dataclass(frozen=True)
class ProviderConfig:
    """Which provider/model produces vectors and at what dimension.

    ``deterministic-hash`` must not carry an endpoint; ``remote`` requires
    one. ``batch_size`` bounds texts per remote request and ``max_inflight``
    bounds concurrent in-flight requests.
    """

    provider_id: str = "deterministic-hash"
    model_id: str = "char3gram-v1"
    dim: int = 256
    endpoint: str | None = None
    batch_size: int = 32
    max_inflight: int = 1

    def __post_init__(self) -> None:
        if self.provider_id not in ("deterministic-hash", "remote"):
            raise DataError(f"unknown provider_id: {self.provider_id!r}")
        if self.dim < 1 or self.batch_size < 1 or self.max_inflight < 1:
            raise DataError("dim, batch_size and max_inflight must be positive")
        if self.provider_id == "deterministic-hash" and self.endpoint:
            raise DataError("deterministic-hash provider takes no endpoint")
        if self.provider_id == "remote" and not self.endpoint:
            raise DataError("remote provider requires an endpoint")


def content_hash(normalized: str) -> str:
    """Stable key for one normalized text."""
    return hashlib.sha256(normalized.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CacheKey:
    provider_id: str
    model_id: str
    content_hash: str


class EmbeddingCache:
    """Append-only on-disk vector cache.

    One file per provider/model, one record per line:
    ``content_hash<TAB>hex-encoded little-endian float64 bytes``. Writes are
    serialized behind a lock; reads may come from any number of workers.
    """

    def __init__(self, directory: str) -> None:
        self.directory = directory
        os.makedirs(directory, exist_ok=True)
        self._lock = threading.Lock()
        self._mem: dict[CacheKey, np.ndarray] = {}
        self._loaded_files: set[str] = set()

    def _path(self, cfg: ProviderConfig) -> str:
        safe = re.sub(r"[^A-Za-z0-9._-]", "_", f"{cfg.provider_id}__{cfg.model_id}")
        return os.path.join(self.directory, safe + ".tsv")

    def _load(self, cfg: ProviderConfig) -> None:
        path = self._path(cfg)
        if path in self._loaded_files:
            return
        self._loaded_files.add(path)
        if not os.path.exists(path):
            return
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or "\t" not in line:
                    continue
                digest, hexbytes = line.split("\t", 1)
                try:
                    vec = np.frombuffer(bytes.fromhex(hexbytes), dtype="<f8")
                except ValueError:
                    continue  # torn write; later records are self-delimiting
                self._mem[CacheKey(cfg.provider_id, cfg.model_id, digest)] = vec

    def get(self, cfg: ProviderConfig, digest: str) -> np.ndarray | None:
        self._load(cfg)
        return self._mem.get(CacheKey(cfg.provider_id, cfg.model_id, digest))

    def put(self, cfg: ProviderConfig, digest: str, vector: np.ndarray) -> None:
        key = CacheKey(cfg.provider_id, cfg.model_id, digest)
        with self._lock:
            if key in self._mem:
                return
            self._mem[key] = vector
            with open(self._path(cfg), "a", encoding="utf-8") as fh:
                fh.write(f"{digest}\t{vector.astype('<f8').tobytes().hex()}\n")


class _HashedGram:
    """Memoized gram -> (bucket, sign) map shared by all hasher instances."""

    def __init__(self) -> None:
        self._seed = HASH_SEED.to_bytes(8, "little")
        self._cache: dict[tuple[str, int], tuple[int, float]] = {}

    def __call__(self, gram: str, dim: int) -> tuple[int, float]:
        key = (gram, dim)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        data = gram.encode("utf-8")
        bucket_digest = hashlib.blake2b(
            data, digest_size=8, key=self._seed, person=b"bucket"
        ).digest()
        sign_digest = hashlib.blake2b(
            data, digest_size=1, key=self._seed, person=b"sign"
        ).digest()
        bucket = int.from_bytes(bucket_digest, "little") % dim
        sign = 1.0 if sign_digest[0] & 1 else -1.0
        self._cache[key] = (bucket, sign)
        return bucket, sign


_hashed_gram = _HashedGram()


def hash_embed(normalized: str, dim: int) -> np.ndarray:
    """Deterministic vector for one normalized text.

    Character 3-grams are hashed into ``dim`` signed buckets and the bucket
    counts L2-normalized, so texts sharing substrings land closer in cosine
    space. A text shorter than 3 characters is hashed as a single gram
    (an all-zero vector is not allowed).
    """
    if not normalized:
        raise EmptyTextError("cannot embed empty text")
    grams = (
        [normalized[i : i + 3] for i in range(len(normalized) - 2)]
        if len(normalized) >= 3
        else [normalized]
    )
    vec = np.zeros(dim, dtype=np.float64)
    for gram in grams:
        bucket, sign = _hashed_gram(gram, dim)
        vec[bucket] += sign
    return _unit(vec)


def _unit(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise DataError("zero vector cannot be normalized")
    return vec / norm


class RemoteTransport:
    """HTTP transport for the remote provider, with a request counter."""

    def __init__(self, session: requests.Session | None = None) -> None:
        self.session = session or requests.Session()
        self.request_count = 0

    def post(self, endpoint: str, payload: dict, timeout: float = 30.0) -> dict:
        self.request_count += 1
        try:
            response = self.session.post(endpoint, json=payload, timeout=timeout)
        except requests.RequestException as exc:
            raise ProviderUnavailableError(f"embedding endpoint unreachable: {exc}")
        if response.status_code != 200:
            raise ProviderUnavailableError(
                f"embedding endpoint returned {response.status_code}"
            )
        return response.json()


class EmbeddingService:
    """Front door for embedding texts under one provider config.

    Texts are normalized, looked up in the cache, and only misses reach the
    provider. Output order always matches input order and every vector is
    unit-norm.
    """

    def __init__(
        self,
        cfg: ProviderConfig,
        cache: EmbeddingCache | None = None,
        transport: RemoteTransport | None = None,
    ) -> None:
        self.cfg = cfg
        self.cache = cache
        self.transport = transport or RemoteTransport()

    def embed_texts(self, texts: list[str]) -> list[np.ndarray]:
        if not texts:
            raise EmptyTextError("embed_texts requires at least one text")
        normalized = [normalize_text(t) for t in texts]
        for i, n in enumerate(normalized):
            if not n:
                raise EmptyTextError(f"text {i} is empty after normalization")
        digests = [content_hash(n) for n in normalized]

        out: list[np.ndarray | None] = [None] * len(texts)
        misses: dict[str, list[int]] = {}
        for i, (n, d) in enumerate(zip(normalized, digests)):
            cached = self.cache.get(self.cfg, d) if self.cache else None
            if cached is not None:
                self._check_dim(cached)
                out[i] = cached
            else:
                misses.setdefault(n, []).append(i)

        if misses:
            texts_to_embed = list(misses)
            vectors = self._compute(texts_to_embed)
            for n, vec in zip(texts_to_embed, vectors):
                self._check_dim(vec)
                for i in misses[n]:
                    out[i] = vec
                if self.cache:
                    self.cache.put(self.cfg, content_hash(n), vec)
        return [v for v in out if v is not None]

    def _check_dim(self, vec: np.ndarray) -> None:
        if vec.shape != (self.cfg.dim,):
            raise DimensionMismatchError(
                f"provider emitted dim {vec.shape}, configured {self.cfg.dim}"
            )

    def _compute(self, normalized: list[str]) -> list[np.ndarray]:
        if self.cfg.provider_id == "deterministic-hash":
            return [hash_embed(n, self.cfg.dim) for n in normalized]
        batches = [
            normalized[start : start + self.cfg.batch_size]
            for start in range(0, len(normalized), self.cfg.batch_size)
        ]

        def fetch(batch: list[str]) -> list[np.ndarray]:
            payload = {"model": self.cfg.model_id, "texts": batch}
            body = self.transport.post(self.cfg.endpoint, payload)
            got = body.get("vectors")
            if not isinstance(got, list) or len(got) != len(batch):
                raise ProviderUnavailableError(
                    "embedding endpoint returned a malformed vectors payload"
                )
            return [_unit(np.asarray(v, dtype=np.float64)) for v in got]

        if self.cfg.max_inflight == 1 or len(batches) == 1:
            results = [fetch(b) for b in batches]
        else:
            with ThreadPoolExecutor(max_workers=self.cfg.max_inflight) as pool:
                results = list(pool.map(fetch, batches))
        return [vec for chunk in results for vec in chunk]


def embed_texts(
    cfg: ProviderConfig,
    texts: list[str],
    cache: EmbeddingCache | None = None,
    transport: RemoteTransport | None = None,
) -> list[np.ndarray]:
    """One-shot convenience over :class:`EmbeddingService`."""
    return EmbeddingService(cfg, cache=cache, transport=transport).embed_texts(texts)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity in [-1, 1]; equals the dot product for unit vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dim mismatch: {a.shape} vs {b.shape}")
    denom = float(np.linalg.norm(a)) * float(np.linalg.norm(b))
    if denom == 0.0:
        raise DataError("cosine undefined for zero vectors")
    return float(np.clip(np.dot(a, b) / denom, -1.0, 1.0))
