"""Provider-agnostic chat-completion access with a deterministic replay backend.

Two provider kinds are supported:

* ``http_chat`` — one POST per completion against a chat-completion endpoint
  (OpenAI-compatible wire shape), with bounded retries on timeouts and 5xx
  responses. Credentials come from the environment variable named in the
  provider spec and never appear in logs or error messages.
* ``replay`` — completions served byte-exactly from a fixture file, keyed by
  (rule id, sample index). This is the primary test path: no network, fully
  deterministic across runs and platforms.

Fixture file format: one JSON record per line with fields
``{"rule_id": str, "sample_index": int, "raw_output": str}``.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import requests

__all__ = [
    "GatewayError",
    "ProviderUnavailable",
    "FixtureMiss",
    "FixtureFormatError",
    "AuthMissing",
    "SamplingConfig",
    "ProviderSpec",
    "ReplayFixture",
    "complete",
    "replay_provider",
    "http_provider",
]

_BACKOFF_BASE = 0.25
_BACKOFF_CAP = 2.0


class GatewayError(Exception):
    """Base class for provider and fixture failures."""


class ProviderUnavailable(GatewayError):
    """The live provider could not produce a completion (after retries)."""


class FixtureMiss(GatewayError):
    """The replay fixture has no entry for the requested key."""


class FixtureFormatError(GatewayError):
    """The replay fixture file is malformed."""


class AuthMissing(GatewayError):
    """The configured credential environment variable is not set."""


@dataclass(frozen=True, slots=True)
class SamplingConfig:
    """Sampling settings; defaults follow the low-temperature, five-vote setup."""

    temperature: float = 0.25
    top_p: float = 1.0
    samples_per_rule: int = 5
    max_output_tokens: int = 1024

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be in [0, 2]: {self.temperature}")
        if not 0.0 < self.top_p <= 1.0:
            raise ValueError(f"top_p must be in (0, 1]: {self.top_p}")
        if self.samples_per_rule < 1:
            raise ValueError("samples_per_rule must be positive")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be positive")


@dataclass(frozen=True, slots=True)
class ProviderSpec:
    """Where completions come from; exactly the fields for ``kind`` are required."""

    kind: str
    endpoint: Optional[str] = None
    model_name: Optional[str] = None
    fixture_path: Optional[str] = None
    timeout: float = 30.0
    max_retries: int = 2
    credential_env: Optional[str] = None
    max_concurrency: int = 4

    def __post_init__(self) -> None:
        if self.kind == "http_chat":
            if not self.endpoint or not self.model_name:
                raise ValueError("http_chat provider requires endpoint and model_name")
            if self.fixture_path is not None:
                raise ValueError("http_chat provider must not set fixture_path")
        elif self.kind == "replay":
            if not self.fixture_path:
                raise ValueError("replay provider requires fixture_path")
            if self.endpoint is not None or self.model_name is not None:
                raise ValueError("replay provider must not set endpoint or model_name")
        else:
            raise ValueError(f"unknown provider kind: {self.kind!r}")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


def replay_provider(fixture_path: Union[str, Path]) -> ProviderSpec:
    return ProviderSpec(kind="replay", fixture_path=str(fixture_path))


def http_provider(
    endpoint: str,
    model_name: str,
    *,
    timeout: float = 30.0,
    max_retries: int = 2,
    credential_env: Optional[str] = None,
    max_concurrency: int = 4,
) -> ProviderSpec:
    return ProviderSpec(
        kind="http_chat",
        endpoint=endpoint,
        model_name=model_name,
        timeout=timeout,
        max_retries=max_retries,
        credential_env=credential_env,
        max_concurrency=max_concurrency,
    )


class ReplayFixture:
    """Read-only map from (rule_id, sample_index) to recorded raw output."""

    def __init__(self, entries: dict[tuple[str, int], str]):
        self._entries = entries

    def __len__(self) -> int:
        return len(self._entries)

    def lookup(self, rule_id: str, sample_index: int) -> str:
        try:
            return self._entries[(rule_id, sample_index)]
        except KeyError:
            raise FixtureMiss(
                f"no fixture entry for rule {rule_id!r} sample {sample_index}"
            ) from None

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ReplayFixture":
        entries: dict[tuple[str, int], str] = {}
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise FixtureFormatError(f"cannot read fixture file {path}: {exc}") from exc
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FixtureFormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if (
                not isinstance(rec, dict)
                or not isinstance(rec.get("rule_id"), str)
                or not isinstance(rec.get("sample_index"), int)
                or not isinstance(rec.get("raw_output"), str)
            ):
                raise FixtureFormatError(
                    f"{path}:{lineno}: record needs rule_id (str), sample_index (int), "
                    "raw_output (str)"
                )
            entries[(rec["rule_id"], rec["sample_index"])] = rec["raw_output"]
        return cls(entries)


_fixture_cache: dict[str, tuple[int, int, ReplayFixture]] = {}
_fixture_lock = threading.Lock()


def _get_fixture(path: str) -> ReplayFixture:
    """Load a fixture once; reload only if the file changed on disk."""

    resolved = str(Path(path).resolve())
    stat = Path(resolved).stat()
    key = (stat.st_mtime_ns, stat.st_size)
    with _fixture_lock:
        cached = _fixture_cache.get(resolved)
        if cached is not None and cached[:2] == key:
            return cached[2]
    fixture = ReplayFixture.load(resolved)
    with _fixture_lock:
        _fixture_cache[resolved] = (key[0], key[1], fixture)
    return fixture


def complete(
    provider: ProviderSpec,
    prompt: str,
    sampling: SamplingConfig,
    sample_index: int,
    *,
    rule_id: Optional[str] = None,
) -> str:
    """One completion for ``prompt``; ``rule_id`` is request metadata keying replay."""

    if provider.kind == "replay":
        if rule_id is None:
            raise FixtureMiss("replay provider needs a rule_id in the request metadata")
        try:
            fixture = _get_fixture(provider.fixture_path)
        except OSError as exc:
            raise FixtureFormatError(f"cannot read fixture file: {exc}") from exc
        return fixture.lookup(rule_id, sample_index)
    return _complete_http(provider, prompt, sampling)


def _complete_http(provider: ProviderSpec, prompt: str, sampling: SamplingConfig) -> str:
    headers = {"Content-Type": "application/json"}
    if provider.credential_env is not None:
        token = os.environ.get(provider.credential_env)
        if not token:
            raise AuthMissing(
                f"credential environment variable {provider.credential_env} is not set"
            )
        headers["Authorization"] = f"Bearer {token}"

    body = {
        "model": provider.model_name,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": sampling.temperature,
        "top_p": sampling.top_p,
        "max_tokens": sampling.max_output_tokens,
    }

    last_reason = "no attempt made"
    attempts = provider.max_retries + 1
    for attempt in range(attempts):
        if attempt > 0:
            time.sleep(min(_BACKOFF_BASE * (2 ** (attempt - 1)), _BACKOFF_CAP))
        try:
            response = requests.post(
                provider.endpoint, json=body, headers=headers, timeout=provider.timeout
            )
        except (requests.Timeout, requests.ConnectionError) as exc:
            last_reason = f"{type(exc).__name__} contacting {provider.endpoint}"
            continue
        if response.status_code >= 500:
            last_reason = f"server error {response.status_code} from {provider.endpoint}"
            continue
        if response.status_code >= 400:
            # Client errors are not retryable; never echo request headers.
            raise ProviderUnavailable(
                f"provider rejected request: status {response.status_code} "
                f"from {provider.endpoint}"
            )
        return _extract_completion(response)
    raise ProviderUnavailable(f"provider unavailable after {attempts} attempts: {last_reason}")


def _extract_completion(response: requests.Response) -> str:
    try:
        doc = response.json()
        content = doc["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise ProviderUnavailable(
            f"malformed completion response: {type(exc).__name__}"
        ) from exc
    if not isinstance(content, str):
        raise ProviderUnavailable("malformed completion response: content is not a string")
    return content
