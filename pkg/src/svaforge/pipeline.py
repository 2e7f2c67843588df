"""Staged NL–SVA synthesis with checkpointed, resumable persistence.

Stages, in fixed order:

  curate           keep designs with a detected clock and reset, decompose
                   each design description into NL properties
  generate_verify  translate each property to an assertion, keep only the
                   ones proven on the design and not free tautologies
  bidirectional    back-translate assertion -> NL -> assertion and keep
                   the pair only if the round trip is bounded-equivalent
  judge            structured accept/reject review of each NL–SVA pair
  difficulty       drop pairs a weak sampler gets right 5 times out of 5
  reasoning        attach a reasoning trajectory whose final assertion is
                   still equivalent
  export           write the training file, optionally decontaminated
                   against a benchmark corpus

Each stage writes `stage_<k>.jsonl` plus a `.hash` sidecar recording the
checkpoint digest, its input digest, and the seed; rerunning a complete
stage with unchanged input is a no-op.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .errors import (BackendError, BoundExceeded, CheckpointCorrupt,
                     ConfigError, EmptyTranslation, NoPropertiesParsed,
                     SvaForgeError, UnparseableVerdict)
from .gateway import BackendProfile, LlmClient, NlProperty
from .metrics import decontaminate
from .rtl.analyze import curate, load_manifest
from .rtl.ast import DesignUnit
from .sva import ast as sva_ast
from .sva.parser import parse_assertion
from .sva.printer import print_assertion
from .verify import Bound, Outcome, equivalent, holds_on_design

log = logging.getLogger(__name__)

STAGES = ("curate", "generate_verify", "bidirectional", "judge",
          "difficulty", "reasoning", "export")


@dataclass
class DropPolicy:
    keep_judge_unknown: bool = False
    keep_missing_think: bool = False


@dataclass
class StageConfig:
    bound: Bound = Bound()
    backends: Dict[str, BackendProfile] = field(default_factory=dict)
    # roles: generator, back_translator, judge, weak, reasoner
    difficulty_samples: int = 5
    drop_policy: DropPolicy = field(default_factory=DropPolicy)
    seed: int = 0
    equivalence_mode: str = "design"  # or "free"
    widths: Dict[str, int] = field(default_factory=dict)  # free mode only
    reset_ticks: int = 1
    reset_patterns: Optional[List[str]] = None
    decontam_corpus: Optional[str] = None  # path to benchmark text lines

    def __post_init__(self):
        if self.difficulty_samples < 1:
            raise ConfigError("difficulty_samples must be >= 1")
        if self.equivalence_mode not in ("design", "free"):
            raise ConfigError(
                f"unknown equivalence mode {self.equivalence_mode!r}")

    def backend(self, role: str) -> BackendProfile:
        if role not in self.backends:
            raise ConfigError(f"no backend configured for role {role!r}")
        return self.backends[role]


@dataclass
class PipelineRecord:
    id: str
    design_ref: str
    nl_text: str
    nl_provenance: str = "decomposed"
    sva_text: Optional[str] = None  # current assertion (y* then y')
    original_sva: Optional[str] = None  # y*, kept after back-translation
    reasoning: Optional[str] = None
    final_sva: Optional[str] = None  # y''
    stage_history: List[list] = field(default_factory=list)
    status: str = "alive"
    drop_stage: Optional[str] = None
    drop_reason: Optional[str] = None

    @property
    def alive(self) -> bool:
        return self.status == "alive"

    @property
    def nl(self) -> NlProperty:
        return NlProperty(self.nl_text, self.nl_provenance)

    @property
    def sva_ast(self) -> Optional[sva_ast.Assertion]:
        return parse_assertion(self.sva_text) if self.sva_text else None

    def note(self, stage: str, verdict: str, detail=None):
        self.stage_history.append([stage, verdict, detail])

    def drop(self, stage: str, reason: str, detail=None):
        self.note(stage, "dropped", detail)
        self.status = "dropped"
        self.drop_stage = stage
        self.drop_reason = reason

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "id", "design_ref", "nl_text", "nl_provenance", "sva_text",
            "original_sva", "reasoning", "final_sva", "stage_history",
            "status", "drop_stage", "drop_reason")}

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineRecord":
        return cls(**d)


# --------------------------------------------------------------------------
# Stage implementations
# --------------------------------------------------------------------------

def stage_curate(manifest_path, cfg: StageConfig,
                 client: LlmClient) -> List[PipelineRecord]:
    """One alive record per (curated design, decomposed NL property)."""
    designs = load_manifest(manifest_path)
    result = curate(designs, cfg.reset_patterns)
    records: List[PipelineRecord] = []
    generator = cfg.backend("generator")
    for d in result.kept:
        try:
            props = client.analyze_properties(generator, d)
        except (NoPropertiesParsed, BackendError) as exc:
            log.warning("curate: %s yielded no properties (%s)", d.name, exc)
            continue
        for i, prop in enumerate(props):
            rec = PipelineRecord(id=f"{d.name}:{i}", design_ref=d.name,
                                 nl_text=prop.text,
                                 nl_provenance=prop.provenance)
            rec.note("curate", "alive")
            records.append(rec)
    for name, reason in result.rejected:
        log.info("curate: rejected design %s (%s)", name, reason)
    return records


def _equiv(a, b, cfg: StageConfig, design: DesignUnit):
    if cfg.equivalence_mode == "design":
        return equivalent(a, b, cfg.bound, design=design,
                          reset_ticks=cfg.reset_ticks)
    widths = cfg.widths or {n.name: n.width for n in design.nets}
    return equivalent(a, b, cfg.bound, widths=widths)


def stage_generate_verify(records: List[PipelineRecord], cfg: StageConfig,
                          client: LlmClient,
                          designs: Dict[str, DesignUnit]) -> List[PipelineRecord]:
    """Greedy NL->SVA translation filtered by proof on the design."""
    generator = cfg.backend("generator")
    for rec in records:
        if not rec.alive:
            continue
        d = designs[rec.design_ref]
        try:
            raw, parsed = client.nl2sva(generator, d, rec.nl)
        except BackendError as exc:
            rec.drop("generate_verify", "backend", str(exc))
            continue
        if parsed is None:
            rec.drop("generate_verify", "syntax", raw[:200])
            continue
        try:
            report = holds_on_design(parsed, d, cfg.bound,
                                     reset_ticks=cfg.reset_ticks)
        except BoundExceeded as exc:
            rec.drop("generate_verify", "bound", str(exc))
            continue
        except SvaForgeError as exc:
            rec.drop("generate_verify", "syntax", str(exc))
            continue
        if report.outcome is Outcome.FAILS:
            rec.drop("generate_verify", "not_proven",
                     report.witness.to_rows() if report.witness else None)
            continue
        if report.tautology_flag:
            rec.drop("generate_verify", "tautology", None)
            continue
        rec.sva_text = print_assertion(parsed)
        rec.note("generate_verify", "proven",
                 {"vacuous_attempts": report.attempts_vacuous})
    return records


def stage_bidirectional(records: List[PipelineRecord], cfg: StageConfig,
                        client: LlmClient,
                        designs: Dict[str, DesignUnit]) -> List[PipelineRecord]:
    """SVA -> NL -> SVA round trip; keep only bounded-equivalent pairs."""
    back = cfg.backend("back_translator")
    generator = cfg.backend("generator")
    for rec in records:
        if not rec.alive:
            continue
        d = designs[rec.design_ref]
        y_star = rec.sva_ast
        try:
            x_star = client.sva2nl(back, d, y_star)
            hints = sva_ast.signals_of(y_star)
            raw, y_prime = client.nl2sva(generator, d, x_star,
                                         signal_hints=hints)
        except (BackendError, EmptyTranslation) as exc:
            rec.drop("bidirectional", "backend", str(exc))
            continue
        if y_prime is None:
            rec.drop("bidirectional", "backend",
                     "re-translation unparseable: " + raw[:200])
            continue
        try:
            report = _equiv(y_prime, y_star, cfg, d)
        except BoundExceeded as exc:
            rec.drop("bidirectional", "bound", str(exc))
            continue
        if report.outcome is not Outcome.EQUIVALENT:
            rec.drop("bidirectional", "not_equivalent",
                     {"witness": report.witness.to_rows()
                      if report.witness else None,
                      "verdicts": list(report.witness_verdicts or ())})
            continue
        rec.original_sva = rec.sva_text
        rec.sva_text = print_assertion(y_prime)
        rec.nl_text = x_star.text
        rec.nl_provenance = x_star.provenance
        rec.note("bidirectional", "equivalent")
    return records


def stage_judge(records: List[PipelineRecord], cfg: StageConfig,
                client: LlmClient,
                designs: Dict[str, DesignUnit]) -> List[PipelineRecord]:
    judge = cfg.backend("judge")
    for rec in records:
        if not rec.alive:
            continue
        d = designs[rec.design_ref]
        try:
            accept, flagged = client.judge(judge, d, rec.nl, rec.sva_ast)
        except UnparseableVerdict as exc:
            if cfg.drop_policy.keep_judge_unknown:
                rec.note("judge", "judge_unknown", str(exc))
            else:
                rec.drop("judge", "judge_unknown", str(exc))
            continue
        except BackendError as exc:
            rec.drop("judge", "backend", str(exc))
            continue
        if accept:
            rec.note("judge", "accepted")
        else:
            rec.drop("judge", "judged", sorted(flagged))
    return records


def stage_difficulty(records: List[PipelineRecord], cfg: StageConfig,
                     client: LlmClient,
                     designs: Dict[str, DesignUnit]) -> List[PipelineRecord]:
    """Drop a record only when every weak-model sample parses and is
    equivalent to the current assertion; anything less keeps it."""
    weak = cfg.backend("weak")
    for rec in records:
        if not rec.alive:
            continue
        d = designs[rec.design_ref]
        y = rec.sva_ast
        try:
            samples = client.nl2sva_samples(weak, d, rec.nl,
                                            cfg.difficulty_samples)
        except BackendError as exc:
            log.warning("difficulty %s: backend failure, keeping (%s)",
                        rec.id, exc)
            rec.note("difficulty", "kept", f"backend failure: {exc}")
            continue
        all_easy = True
        for raw, parsed in samples:
            if parsed is None:
                all_easy = False
                break
            try:
                report = _equiv(parsed, y, cfg, d)
            except BoundExceeded as exc:
                log.warning("difficulty %s: %s", rec.id, exc)
                all_easy = False
                break
            if report.outcome is not Outcome.EQUIVALENT:
                all_easy = False
                break
        if all_easy:
            rec.drop("difficulty", "trivial",
                     f"{cfg.difficulty_samples}/{cfg.difficulty_samples} "
                     "samples equivalent")
        else:
            rec.note("difficulty", "kept")
    return records


def stage_reasoning(records: List[PipelineRecord], cfg: StageConfig,
                    client: LlmClient,
                    designs: Dict[str, DesignUnit]) -> List[PipelineRecord]:
    reasoner = cfg.backend("reasoner")
    for rec in records:
        if not rec.alive:
            continue
        d = designs[rec.design_ref]
        try:
            r, y2 = client.reason(reasoner, d, rec.nl)
        except BackendError as exc:
            rec.drop("reasoning", "backend", str(exc))
            continue
        if not r and not cfg.drop_policy.keep_missing_think:
            rec.drop("reasoning", "missing_think", None)
            continue
        if y2 is None:
            rec.drop("reasoning", "syntax", None)
            continue
        try:
            report = _equiv(y2, rec.sva_ast, cfg, d)
        except BoundExceeded as exc:
            rec.drop("reasoning", "bound", str(exc))
            continue
        if report.outcome is not Outcome.EQUIVALENT:
            rec.drop("reasoning", "mismatch",
                     {"witness": report.witness.to_rows()
                      if report.witness else None})
            continue
        rec.reasoning = r
        rec.final_sva = print_assertion(y2)
        rec.note("reasoning", "equivalent")
    return records


def export_sft(records: Sequence[PipelineRecord],
               designs: Dict[str, DesignUnit], out_path,
               decontam_corpus: Optional[Sequence[str]] = None) -> dict:
    """Write the training file; one JSON line per surviving record."""
    rows = []
    for rec in records:
        if not rec.alive:
            continue
        d = designs[rec.design_ref]
        digest = hashlib.sha256(
            json.dumps(rec.stage_history, sort_keys=True).encode()
        ).hexdigest()[:16]
        rows.append({
            "input": d.source + "\n" + rec.nl_text,
            "label": f"<think>{rec.reasoning or ''}</think>{rec.final_sva}",
            "meta": {"id": rec.id, "design_ref": rec.design_ref,
                     "stage_history": digest},
        })
    removed = 0
    if decontam_corpus:
        texts = [r["input"] + "\n" + r["label"] for r in rows]
        report = decontaminate(texts, list(decontam_corpus))
        contaminated = {idx for idx, _ in report.overlaps}
        removed = len(contaminated)
        for idx, gram in report.overlaps:
            log.info("export: dropping %s (13-gram overlap: %s)",
                     rows[idx]["meta"]["id"], gram)
        rows = [r for i, r in enumerate(rows) if i not in contaminated]
    out_path = Path(out_path)
    with out_path.open("w") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    return {"exported": len(rows), "decontaminated": removed,
            "path": str(out_path)}


# --------------------------------------------------------------------------
# Orchestration with checkpoints
# --------------------------------------------------------------------------

def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _write_checkpoint(workdir: Path, stage: str, seed: int, input_hash: str,
                      records: Sequence[PipelineRecord]) -> str:
    body = "".join(json.dumps(r.to_dict(), sort_keys=True) + "\n"
                   for r in records)
    path = workdir / f"stage_{stage}.jsonl"
    path.write_text(body)
    content = _digest(body.encode())
    (workdir / f"stage_{stage}.hash").write_text(json.dumps(
        {"content": content, "input": input_hash, "seed": seed},
        sort_keys=True) + "\n")
    return content


def _load_checkpoint(workdir: Path, stage: str) -> Optional[tuple]:
    """(records, content_hash, meta) if the checkpoint exists and its
    digest matches; CheckpointCorrupt on mismatch; None if absent."""
    path = workdir / f"stage_{stage}.jsonl"
    hash_path = workdir / f"stage_{stage}.hash"
    if not path.exists() or not hash_path.exists():
        return None
    body = path.read_text()
    meta = json.loads(hash_path.read_text())
    content = _digest(body.encode())
    if content != meta.get("content"):
        raise CheckpointCorrupt(path)
    records = [PipelineRecord.from_dict(json.loads(line))
               for line in body.splitlines() if line.strip()]
    return records, content, meta


def run(manifest_path, cfg: StageConfig, workdir,
        client: Optional[LlmClient] = None,
        from_stage: str = "curate", to_stage: str = "export") -> dict:
    """Execute the stage range, reusing valid checkpoints, and return a
    per-stage summary of alive counts and drop reasons."""
    if from_stage not in STAGES or to_stage not in STAGES:
        raise ConfigError(f"stages must be among {STAGES}")
    lo, hi = STAGES.index(from_stage), STAGES.index(to_stage)
    if hi < lo:
        raise ConfigError(f"to_stage {to_stage!r} precedes {from_stage!r}")
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    client = client or LlmClient(audit=_default_audit(workdir))

    designs = {d.name: d for d in
               curate(load_manifest(manifest_path), cfg.reset_patterns).kept}
    manifest_hash = _digest(Path(manifest_path).read_bytes())

    summary: Dict[str, dict] = {}
    records: Optional[List[PipelineRecord]] = None
    if lo > 0:
        prev = STAGES[lo - 1]
        loaded = _load_checkpoint(workdir, prev)
        if loaded is None:
            raise ConfigError(
                f"resume from {from_stage!r} needs checkpoint stage_{prev}")
        records, input_hash, _ = loaded
    else:
        input_hash = manifest_hash

    for k in range(lo, hi + 1):
        stage = STAGES[k]
        if stage == "export":
            corpus = None
            if cfg.decontam_corpus:
                corpus = Path(cfg.decontam_corpus).read_text().splitlines()
            report = export_sft(records, designs, workdir / "sft.jsonl",
                                corpus)
            (workdir / "export_report.json").write_text(
                json.dumps(report, sort_keys=True) + "\n")
            summary[stage] = report
            continue
        existing = _load_checkpoint(workdir, stage)
        if existing is not None and existing[2].get("input") == input_hash \
                and existing[2].get("seed") == cfg.seed:
            records, input_hash, _ = existing
            summary[stage] = _stage_summary(stage, records, skipped=True)
            continue
        if stage == "curate":
            records = stage_curate(manifest_path, cfg, client)
        else:
            fn = {"generate_verify": stage_generate_verify,
                  "bidirectional": stage_bidirectional,
                  "judge": stage_judge,
                  "difficulty": stage_difficulty,
                  "reasoning": stage_reasoning}[stage]
            records = fn(records, cfg, client, designs)
        input_hash = _write_checkpoint(workdir, stage, cfg.seed,
                                       input_hash, records)
        summary[stage] = _stage_summary(stage, records)
    return summary


def _stage_summary(stage: str, records: Sequence[PipelineRecord],
                   skipped: bool = False) -> dict:
    alive = sum(1 for r in records if r.alive)
    reasons: Dict[str, int] = {}
    for r in records:
        if r.drop_stage == stage:
            reasons[r.drop_reason] = reasons.get(r.drop_reason, 0) + 1
    out = {"alive": alive, "dropped": reasons}
    if skipped:
        out["skipped"] = True
    return out


def _default_audit(workdir: Path):
    from .gateway import AuditLog

    return AuditLog(workdir / "audit.log")
