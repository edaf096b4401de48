"""Pipeline configuration: file values < environment overrides < CLI flags.

Config is a single JSON file. Provider sections select an implementation
by "type": chat is "openai" (any OpenAI-compatible endpoint) or "mock";
embedding is "openai" or "hash" (the offline deterministic embedder);
reranker is "remote" or "lexical". API keys are referenced by environment
variable name only and never appear in config or serialized output.
"""

from __future__ import annotations

import copy
import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from citecheck.chunker import ChunkConfig
from citecheck.llm_gateway import (
    HashingEmbedder,
    MockChatProvider,
    OpenAICompatChatClient,
    OpenAICompatEmbeddingClient,
    ProviderConfig,
)
from citecheck.retrieval import LexicalReranker, RemoteReranker, RetrievalConfig

ENV_PREFIX = "CITECHECK_"

DEFAULT_CONFIG: dict = {
    "chat": {
        "type": "openai",
        "name": "openai",
        "base_url": "https://api.openai.com/v1",
        "model": "gpt-4o-mini",
        "api_key_env": "OPENAI_API_KEY",
        "timeout": 60.0,
        "max_retries": 3,
        "temperature": 0.0,
    },
    "embedding": {"type": "hash", "dimension": 8},
    "reranker": {"type": "lexical"},
    "retrieval": {"k_dense": 15, "k_sparse": 15, "k_final": 3},
    "chunking": {"max_size": 512, "overlap": 50},
    "preprocess": "llm",
    "mode": "lenient",
    "verify_temperature": 0.0,
    "persist_indexes": False,
    "store_dir": "citecheck_store",
}


class ConfigError(Exception):
    pass


def _deep_merge(base: dict, override: dict) -> dict:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _apply_env_overrides(data: dict, environ=None) -> dict:
    """CITECHECK_SECTION__FIELD=value overrides; values parsed as JSON when possible."""
    environ = os.environ if environ is None else environ
    out = copy.deepcopy(data)
    for name, raw in environ.items():
        if not name.startswith(ENV_PREFIX) or name == "CITECHECK_CONFIG":
            continue
        path = [part.lower() for part in name[len(ENV_PREFIX):].split("__")]
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = out
        for part in path[:-1]:
            if not isinstance(node.get(part), dict):
                node[part] = {}
            node = node[part]
        node[path[-1]] = value
    return out


@dataclass(frozen=True)
class PipelineConfig:
    chat: dict
    embedding: dict
    reranker: dict
    retrieval: RetrievalConfig
    chunking: ChunkConfig
    preprocess: str = "llm"
    mode: str = "lenient"
    verify_temperature: float = 0.0
    persist_indexes: bool = False
    store_dir: Path = field(default_factory=lambda: Path("citecheck_store"))

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        merged = _deep_merge(DEFAULT_CONFIG, data)
        if merged["mode"] not in ("strict", "lenient"):
            raise ConfigError(f"mode must be 'strict' or 'lenient', got {merged['mode']!r}")
        if merged["preprocess"] not in ("llm", "rules"):
            raise ConfigError(f"preprocess must be 'llm' or 'rules', got {merged['preprocess']!r}")
        retrieval = RetrievalConfig(**merged["retrieval"])
        chunking = ChunkConfig(**merged["chunking"])
        return cls(
            chat=merged["chat"],
            embedding=merged["embedding"],
            reranker=merged["reranker"],
            retrieval=retrieval,
            chunking=chunking,
            preprocess=merged["preprocess"],
            mode=merged["mode"],
            verify_temperature=float(merged["verify_temperature"]),
            persist_indexes=bool(merged["persist_indexes"]),
            store_dir=Path(merged["store_dir"]),
        )

    @classmethod
    def load(cls, path: str | Path | None = None, environ=None, flag_overrides: dict | None = None) -> "PipelineConfig":
        data: dict = {}
        if path is not None:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        data = _apply_env_overrides(_deep_merge(DEFAULT_CONFIG, data), environ)
        if flag_overrides:
            data = _deep_merge(data, flag_overrides)
        return cls.from_dict(data)

    def with_overrides(self, overrides: dict) -> "PipelineConfig":
        return PipelineConfig.from_dict(_deep_merge(self.to_dict(), overrides))

    def to_dict(self) -> dict:
        return {
            "chat": copy.deepcopy(self.chat),
            "embedding": copy.deepcopy(self.embedding),
            "reranker": copy.deepcopy(self.reranker),
            "retrieval": {
                "k_dense": self.retrieval.k_dense,
                "k_sparse": self.retrieval.k_sparse,
                "k_final": self.retrieval.k_final,
            },
            "chunking": {
                "max_size": self.chunking.max_size,
                "overlap": self.chunking.overlap,
                "separators": list(self.chunking.separators),
            },
            "preprocess": self.preprocess,
            "mode": self.mode,
            "verify_temperature": self.verify_temperature,
            "persist_indexes": self.persist_indexes,
            "store_dir": str(self.store_dir),
        }

    def redacted(self) -> dict:
        """Config safe to expose over the API; any literal key material is masked."""
        data = self.to_dict()
        for section in ("chat", "embedding", "reranker"):
            for key in list(data[section]):
                if "key" in key.lower() and key.lower() != "api_key_env":
                    data[section][key] = "***"
        return data

    def fingerprint(self) -> str:
        """Stable hash over behavior-relevant settings, for cache and result ids.

        The store directory is a storage location, not behavior, so it is
        excluded: the same request under the same providers yields the same
        verification id wherever the stores live.
        """
        data = self.to_dict()
        data.pop("store_dir")
        payload = json.dumps(data, sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]

    def build_chat(self):
        kind = self.chat.get("type", "openai")
        if kind == "mock":
            fixtures = [(f["match"], f["reply"]) for f in self.chat.get("fixtures", [])]
            return MockChatProvider(
                fixtures=fixtures,
                default_reply=self.chat.get("default_reply", ""),
                model_id=self.chat.get("model", "mock-chat"),
            )
        if kind == "openai":
            return OpenAICompatChatClient(
                ProviderConfig(
                    kind="chat",
                    name=self.chat.get("name", "chat"),
                    base_url=self.chat["base_url"],
                    model=self.chat["model"],
                    api_key_env=self.chat.get("api_key_env", ""),
                    timeout=float(self.chat.get("timeout", 60.0)),
                    max_retries=int(self.chat.get("max_retries", 3)),
                    temperature=float(self.chat.get("temperature", 0.0)),
                    in_flight_cap=int(self.chat.get("in_flight_cap", 4)),
                )
            )
        raise ConfigError(f"unknown chat provider type {kind!r}")

    def build_embedder(self):
        kind = self.embedding.get("type", "hash")
        if kind == "hash":
            return HashingEmbedder(dimension=int(self.embedding.get("dimension", 8)))
        if kind == "openai":
            return OpenAICompatEmbeddingClient(
                ProviderConfig(
                    kind="embedding",
                    name=self.embedding.get("name", "embedding"),
                    base_url=self.embedding["base_url"],
                    model=self.embedding["model"],
                    api_key_env=self.embedding.get("api_key_env", ""),
                    timeout=float(self.embedding.get("timeout", 60.0)),
                    max_retries=int(self.embedding.get("max_retries", 3)),
                    in_flight_cap=int(self.embedding.get("in_flight_cap", 4)),
                )
            )
        raise ConfigError(f"unknown embedding provider type {kind!r}")

    def build_reranker(self):
        kind = self.reranker.get("type", "lexical")
        if kind == "lexical":
            return LexicalReranker()
        if kind == "remote":
            return RemoteReranker(
                ProviderConfig(
                    kind="reranker",
                    name=self.reranker.get("name", "reranker"),
                    base_url=self.reranker["base_url"],
                    model=self.reranker.get("model", ""),
                    timeout=float(self.reranker.get("timeout", 30.0)),
                    in_flight_cap=int(self.reranker.get("in_flight_cap", 4)),
                ),
                scores_are_logits=bool(self.reranker.get("scores_are_logits", False)),
            )
        raise ConfigError(f"unknown reranker type {kind!r}")
