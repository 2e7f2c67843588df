"""Chat-completion backends, prompt templates, and response parsing.

Two backend kinds: a remote chat-completions HTTP endpoint and a
deterministic scripted mock driven by a JSON Lines fixture keyed on
(template id, prompt hash, sample index). Every call is appended to an
audit log before its result is used, so failed runs leave evidence.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (BackendError, ConfigError, EmptyTranslation,
                     MissingPlaceholder, MockKeyMissing, NoPropertiesParsed,
                     UnparseableVerdict)
from .rtl.ast import DesignUnit
from .sva import ast as sva_ast
from .sva.parser import extract_assertions
from .sva.printer import print_assertion

log = logging.getLogger(__name__)

TEMPLATE_IDS = ("property_analysis", "nl2sva", "sva2nl", "judge", "reasoning")

# Placeholders each template must contain to serve its stage.
REQUIRED_PLACEHOLDERS = {
    "property_analysis": {"spec", "code"},
    "nl2sva": {"code", "nl", "signals"},
    "sva2nl": {"code", "sva"},
    "judge": {"code", "nl", "sva", "error_taxonomy"},
    "reasoning": {"code", "nl"},
}

ERROR_CATEGORIES = (
    "logical_misalignment",
    "signal_inconsistency",
    "rtl_misunderstanding",
    "wrong_sva_object",
)

_TAXONOMY_TEXT = "\n".join(
    f"- {c.replace('_', ' ')}" for c in ERROR_CATEGORIES)

_DEFAULT_TEMPLATE_DIR = Path(__file__).parent / "data" / "prompts"


@dataclass(frozen=True)
class Sampling:
    temperature: float = 0.8
    top_p: float = 0.95
    max_tokens: int = 1024
    mode: str = "sample"  # or "greedy"

    def __post_init__(self):
        if self.temperature < 0:
            raise ConfigError("temperature must be >= 0")
        if self.mode not in ("sample", "greedy"):
            raise ConfigError(f"unknown sampling mode {self.mode!r}")
        if self.mode == "greedy" and self.temperature != 0.0:
            object.__setattr__(self, "temperature", 0.0)


GREEDY = Sampling(temperature=0.0, mode="greedy")
SAMPLE_08 = Sampling(temperature=0.8, mode="sample")


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    backoff: float = 0.5  # seconds; doubles per retry


@dataclass(frozen=True)
class BackendProfile:
    name: str
    kind: str  # "http" | "mock"
    endpoint: Optional[str] = None
    credential_env: Optional[str] = None  # env var holding the bearer token
    model: Optional[str] = None
    fixture: Optional[str] = None  # mock fixture path
    sampling: Sampling = Sampling()
    retry: RetryPolicy = RetryPolicy()

    def __post_init__(self):
        if self.kind not in ("http", "mock"):
            raise ConfigError(f"unknown backend kind {self.kind!r}")
        if self.kind == "http" and not self.endpoint:
            raise ConfigError(f"http backend {self.name!r} needs an endpoint")
        if self.kind == "mock" and not self.fixture:
            raise ConfigError(f"mock backend {self.name!r} needs a fixture")

    @classmethod
    def from_dict(cls, cfg: dict) -> "BackendProfile":
        sampling = Sampling(**cfg.get("sampling", {}))
        retry = RetryPolicy(**cfg.get("retry", {}))
        known = {"name", "kind", "endpoint", "credential_env", "model",
                 "fixture"}
        extra = set(cfg) - known - {"sampling", "retry"}
        if extra:
            raise ConfigError(f"unknown backend keys: {sorted(extra)}")
        return cls(sampling=sampling, retry=retry,
                   **{k: cfg[k] for k in known if k in cfg})


@dataclass(frozen=True)
class NlProperty:
    text: str
    provenance: str  # "decomposed" | "back_translated" | "manual"
    index: int = 0


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    text: str

    def placeholders(self) -> frozenset:
        return frozenset(m.group(1)
                         for m in re.finditer(r"\{(\w+)\}", self.text))

    def render(self, bindings: Dict[str, str]) -> str:
        needed = self.placeholders()
        for name in needed:
            if name not in bindings:
                raise MissingPlaceholder(self.id, name)
        return self.text.format(**{k: bindings[k] for k in needed})


def prompt_hash(template_id: str, rendered: str) -> str:
    """Stable 16-hex-digit key for a rendered prompt."""
    digest = hashlib.sha256(
        template_id.encode() + b"\0" + rendered.encode()).hexdigest()
    return digest[:16]


def load_templates(directory: Optional[Path] = None) -> Dict[str, PromptTemplate]:
    directory = Path(directory) if directory else _DEFAULT_TEMPLATE_DIR
    templates = {}
    for tid in TEMPLATE_IDS:
        path = directory / f"{tid}.txt"
        if not path.exists():
            raise ConfigError(f"missing template file: {path}")
        tpl = PromptTemplate(tid, path.read_text())
        missing = REQUIRED_PLACEHOLDERS[tid] - tpl.placeholders()
        if missing:
            raise ConfigError(
                f"template {tid} lacks placeholders: {sorted(missing)}")
        templates[tid] = tpl
    return templates


class AuditLog:
    """Single-writer append log of every backend call (no timestamps,
    so identical runs produce identical logs)."""

    def __init__(self, path: Optional[Path] = None):
        self.path = Path(path) if path else None
        self._lock = threading.Lock()
        self.entries: List[dict] = []

    def record(self, entry: dict):
        with self._lock:
            self.entries.append(entry)
            if self.path is not None:
                with self.path.open("a") as fh:
                    fh.write(json.dumps(entry, sort_keys=True) + "\n")


class MockBackend:
    """Replays fixture responses; bit-deterministic by construction."""

    def __init__(self, fixture_path):
        self.table: Dict[Tuple[str, str, int], str] = {}
        for line in Path(fixture_path).read_text().splitlines():
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            key = (row["template_id"], row["prompt_hash"],
                   int(row["sample_index"]))
            self.table[key] = row["response"]

    def generate(self, template_id: str, rendered: str, sampling: Sampling,
                 n_samples: int) -> List[Tuple[str, int]]:
        h = prompt_hash(template_id, rendered)
        out = []
        for i in range(n_samples):
            if (template_id, h, i) not in self.table:
                raise MockKeyMissing(template_id, h, i)
            out.append((self.table[(template_id, h, i)], 0))
        return out


class HttpBackend:
    """One chat-completions request per sample, with bounded retries."""

    _RETRYABLE = {408, 425, 429, 500, 502, 503, 504}

    def __init__(self, profile: BackendProfile, transport=None):
        import httpx

        self.profile = profile
        headers = {}
        if profile.credential_env:
            token = os.environ.get(profile.credential_env)
            if not token:
                raise ConfigError(
                    f"credential env var {profile.credential_env} is unset")
            headers["Authorization"] = f"Bearer {token}"
        self._client = httpx.Client(headers=headers, timeout=60.0,
                                    transport=transport)

    def generate(self, template_id: str, rendered: str, sampling: Sampling,
                 n_samples: int) -> List[Tuple[str, int]]:
        out = []
        for i in range(n_samples):
            out.append(self._one(rendered, sampling))
        return out

    def _one(self, rendered: str, sampling: Sampling) -> Tuple[str, int]:
        import httpx

        body = {
            "messages": [{"role": "user", "content": rendered}],
            "temperature": sampling.temperature,
            "top_p": sampling.top_p,
            "max_tokens": sampling.max_tokens,
            "n": 1,
        }
        if self.profile.model:
            body["model"] = self.profile.model
        retry = self.profile.retry
        delay = retry.backoff
        last = None
        for attempt in range(retry.max_attempts):
            try:
                resp = self._client.post(self.profile.endpoint, json=body)
            except httpx.HTTPError as exc:
                last = str(exc)
            else:
                if resp.status_code == 200:
                    data = resp.json()
                    return (data["choices"][0]["message"]["content"], attempt)
                last = f"HTTP {resp.status_code}"
                if resp.status_code not in self._RETRYABLE:
                    break
            if attempt + 1 < retry.max_attempts:
                time.sleep(delay)
                delay *= 2
        raise BackendError(
            f"{self.profile.name}: giving up after "
            f"{retry.max_attempts} attempts ({last})")


class CallableBackend:
    """Adapter for tests: wraps fn(template_id, rendered, index) -> str."""

    def __init__(self, fn):
        self.fn = fn

    def generate(self, template_id, rendered, sampling, n_samples):
        return [(self.fn(template_id, rendered, i), 0)
                for i in range(n_samples)]


def _make_backend(profile: BackendProfile):
    if profile.kind == "mock":
        return MockBackend(profile.fixture)
    return HttpBackend(profile)


class LlmClient:
    """Template rendering, backend dispatch, auditing, and the five
    stage-facing operations."""

    def __init__(self, template_dir=None, audit: Optional[AuditLog] = None,
                 backend_factory=_make_backend):
        self.templates = load_templates(template_dir)
        self.audit = audit or AuditLog()
        self._backend_factory = backend_factory
        self._backends: Dict[str, object] = {}

    def _backend(self, profile: BackendProfile):
        if profile.name not in self._backends:
            self._backends[profile.name] = self._backend_factory(profile)
        return self._backends[profile.name]

    # -- core ------------------------------------------------------------

    def complete(self, profile: BackendProfile, template_id: str,
                 bindings: Dict[str, str], n_samples: int = 1,
                 sampling: Optional[Sampling] = None) -> List[str]:
        if n_samples < 1:
            raise ConfigError("n_samples must be >= 1")
        sampling = sampling or profile.sampling
        rendered = self.templates[template_id].render(bindings)
        h = prompt_hash(template_id, rendered)
        raw = self._backend(profile).generate(template_id, rendered,
                                              sampling, n_samples)
        responses = []
        for i, (text, retries) in enumerate(raw):
            self.audit.record({
                "backend": profile.name,
                "template_id": template_id,
                "prompt_hash": h,
                "sample_index": i,
                "retries": retries,
                "response": text[:200],
            })
            responses.append(text)
        return responses

    # -- stage operations --------------------------------------------------

    def analyze_properties(self, profile: BackendProfile,
                           d: DesignUnit) -> List[NlProperty]:
        """Decompose a design's prose description into independent
        single-sentence properties."""
        [response] = self.complete(
            profile, "property_analysis",
            {"spec": d.spec or "", "code": d.source},
            sampling=SAMPLE_08)
        props = []
        for m in re.finditer(r"^\s*Property\s+(\d+)\s*:\s*(.+?)\s*$",
                             response, re.MULTILINE):
            props.append(NlProperty(m.group(2), "decomposed",
                                    index=int(m.group(1))))
        if not props:
            self.audit.record({"event": "no_properties",
                               "design": d.name,
                               "response": response[:200]})
            raise NoPropertiesParsed(d.name)
        return props

    def nl2sva(self, profile: BackendProfile, d: DesignUnit, x: NlProperty,
               signal_hints: Optional[Sequence[str]] = None,
               sampling: Sampling = GREEDY,
               ) -> Tuple[str, Optional[sva_ast.Assertion]]:
        """Translate one NL property to an assertion; unparseable output
        returns parsed=None rather than raising."""
        hints = list(signal_hints) if signal_hints else \
            [n.name for n in d.nets]
        [response] = self.complete(
            profile, "nl2sva",
            {"code": d.source, "nl": x.text, "signals": ", ".join(hints)},
            sampling=sampling)
        return response, first_assertion(response)

    def nl2sva_samples(self, profile: BackendProfile, d: DesignUnit,
                       x: NlProperty, n_samples: int,
                       signal_hints: Optional[Sequence[str]] = None,
                       ) -> List[Tuple[str, Optional[sva_ast.Assertion]]]:
        """n independent sampled translations (difficulty probing)."""
        hints = list(signal_hints) if signal_hints else \
            [n.name for n in d.nets]
        responses = self.complete(
            profile, "nl2sva",
            {"code": d.source, "nl": x.text, "signals": ", ".join(hints)},
            n_samples=n_samples, sampling=SAMPLE_08)
        return [(r, first_assertion(r)) for r in responses]

    def sva2nl(self, profile: BackendProfile, d: DesignUnit,
               y: sva_ast.Assertion) -> NlProperty:
        [response] = self.complete(
            profile, "sva2nl",
            {"code": d.source, "sva": print_assertion(y)},
            sampling=SAMPLE_08)
        text = " ".join(response.split())
        if not text:
            raise EmptyTranslation(y.label)
        return NlProperty(text, "back_translated")

    def judge(self, profile: BackendProfile, d: DesignUnit, x: NlProperty,
              y: sva_ast.Assertion) -> Tuple[bool, frozenset]:
        [response] = self.complete(
            profile, "judge",
            {"code": d.source, "nl": x.text, "sva": print_assertion(y),
             "error_taxonomy": _TAXONOMY_TEXT},
            sampling=GREEDY)
        return parse_verdict(response)

    def reason(self, profile: BackendProfile, d: DesignUnit, x: NlProperty,
               ) -> Tuple[str, Optional[sva_ast.Assertion]]:
        [response] = self.complete(
            profile, "reasoning",
            {"code": d.source, "nl": x.text},
            sampling=SAMPLE_08)
        r, remainder = split_reasoning(response)
        return r, first_assertion(remainder)


def first_assertion(text: str) -> Optional[sva_ast.Assertion]:
    """First parseable assertion in a response, if any."""
    for cand in extract_assertions(text):
        if cand.assertion is not None:
            return cand.assertion
    return None


_VERDICT_RE = re.compile(
    r"VERDICT:\s*(ACCEPT|REJECT\s*\(([^)]*)\))\s*$", re.MULTILINE)


def parse_verdict(response: str) -> Tuple[bool, frozenset]:
    """Parse the mandated final `VERDICT:` line into (accept, categories)."""
    matches = list(_VERDICT_RE.finditer(response))
    if not matches:
        raise UnparseableVerdict(response[-200:])
    m = matches[-1]
    if m.group(1).startswith("ACCEPT"):
        return True, frozenset()
    cats = set()
    for part in m.group(2).split(","):
        slug = re.sub(r"[^a-z0-9]+", "_", part.strip().lower()).strip("_")
        if slug not in ERROR_CATEGORIES:
            raise UnparseableVerdict(f"unknown category {part.strip()!r}")
        cats.add(slug)
    return False, frozenset(cats)


_THINK_RE = re.compile(r"<think>(.*?)</think>", re.DOTALL)


def split_reasoning(response: str) -> Tuple[str, str]:
    """(concatenated think-block text, response with think blocks removed)."""
    blocks = _THINK_RE.findall(response)
    remainder = _THINK_RE.sub("", response)
    return "".join(b.strip() for b in blocks), remainder
