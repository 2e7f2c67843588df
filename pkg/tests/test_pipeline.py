"""Staged synthesis flow: drops, checkpoints, resumability, export."""

import json
import re
from pathlib import Path

import pytest

from svaforge.config import load_config
from svaforge.errors import CheckpointCorrupt, ConfigError
from svaforge.gateway import (AuditLog, BackendProfile, CallableBackend,
                              LlmClient)
from svaforge.pipeline import (STAGES, PipelineRecord, StageConfig,
                               export_sft, run, stage_difficulty)
from svaforge.rtl import curate, parse_design
from svaforge.rtl.analyze import load_manifest
from svaforge.sva import parse_assertion
from svaforge.verify import Bound

DATA = Path(__file__).resolve().parents[1] / "src" / "svaforge" / "data"
CONFIG = DATA / "mock_config.json"


@pytest.fixture()
def mock_run(tmp_path):
    cfg = load_config(CONFIG)
    workdir = tmp_path / "wd"
    client = LlmClient(audit=AuditLog())
    summary = run(cfg.manifest, cfg.stage, workdir, client)
    return cfg, workdir, summary


def test_full_mock_run_matches_golden_summary(mock_run):
    _, _, summary = mock_run
    summary = json.loads(json.dumps(summary))
    summary["export"].pop("path")
    golden = json.loads((Path(__file__).parent / "golden" /
                         "pipeline_summary.json").read_text())
    assert summary == golden


def test_alive_counts_never_increase(mock_run):
    _, _, summary = mock_run
    counts = [summary[s]["alive"] for s in STAGES[:-1]]
    assert counts == sorted(counts, reverse=True)


def test_drop_reasons_partition_the_records(mock_run):
    _, workdir, summary = mock_run
    total_drops = sum(sum(summary[s]["dropped"].values())
                      for s in STAGES[:-1])
    final_alive = summary[STAGES[-2]]["alive"]
    first_count = summary["curate"]["alive"]
    assert final_alive + total_drops == first_count
    # each dropped record carries exactly one (stage, reason)
    rows = [json.loads(ln) for ln in
            (workdir / "stage_reasoning.jsonl").read_text().splitlines()]
    for row in rows:
        if row["status"] == "dropped":
            assert row["drop_stage"] is not None
            assert row["drop_reason"] is not None
        else:
            assert row["drop_stage"] is None


def test_two_runs_are_byte_identical(tmp_path):
    cfg = load_config(CONFIG)
    outputs = []
    for name in ("r1", "r2"):
        wd = tmp_path / name
        run(cfg.manifest, cfg.stage, wd, LlmClient(audit=AuditLog()))
        outputs.append({p.name: p.read_bytes()
                        for p in sorted(wd.iterdir())
                        if p.suffix in (".jsonl", ".hash")})
    assert outputs[0] == outputs[1]


def test_exported_labels_are_well_formed(mock_run):
    _, workdir, _ = mock_run
    rows = [json.loads(ln) for ln in
            (workdir / "sft.jsonl").read_text().splitlines()]
    assert rows
    for row in rows:
        m = re.fullmatch(r"<think>(.*)</think>(.+)", row["label"],
                         re.DOTALL)
        assert m, row["label"]
        parse_assertion(m.group(2))  # SVA suffix must reparse
        assert row["input"].startswith("module ")


def test_rerun_skips_completed_stages(mock_run):
    cfg, workdir, _ = mock_run
    before = {p.name: p.stat().st_mtime_ns for p in workdir.iterdir()
              if p.name.startswith("stage_")}
    summary = run(cfg.manifest, cfg.stage, workdir, LlmClient(audit=AuditLog()))
    after = {p.name: p.stat().st_mtime_ns for p in workdir.iterdir()
             if p.name.startswith("stage_")}
    assert before == after  # no checkpoint rewritten
    assert all(summary[s].get("skipped") for s in STAGES[:-1])


def test_seed_change_invalidates_checkpoints(mock_run):
    cfg, workdir, _ = mock_run
    cfg.stage.seed = 99
    summary = run(cfg.manifest, cfg.stage, workdir, LlmClient(audit=AuditLog()))
    assert not any(summary[s].get("skipped") for s in STAGES[:-1])


def test_corrupted_checkpoint_aborts_with_path(mock_run):
    cfg, workdir, _ = mock_run
    target = workdir / "stage_generate_verify.jsonl"
    target.write_text(target.read_text() + "tampered\n")
    with pytest.raises(CheckpointCorrupt) as err:
        run(cfg.manifest, cfg.stage, workdir, LlmClient(audit=AuditLog()))
    assert "stage_generate_verify" in err.value.path


def test_stage_order_validation(tmp_path):
    cfg = load_config(CONFIG)
    with pytest.raises(ConfigError):
        run(cfg.manifest, cfg.stage, tmp_path / "x",
            LlmClient(audit=AuditLog()),
            from_stage="judge", to_stage="curate")


def test_resume_from_mid_stage_requires_checkpoint(tmp_path):
    cfg = load_config(CONFIG)
    with pytest.raises(ConfigError):
        run(cfg.manifest, cfg.stage, tmp_path / "x",
            LlmClient(audit=AuditLog()), from_stage="judge")


def test_empty_manifest_yields_zero_records(tmp_path):
    manifest = tmp_path / "empty.jsonl"
    manifest.write_text("")
    cfg = load_config(CONFIG)
    summary = run(manifest, cfg.stage, tmp_path / "wd",
                  LlmClient(audit=AuditLog()))
    assert summary["curate"]["alive"] == 0
    assert summary["export"]["exported"] == 0


# -- difficulty-filter semantics ----------------------------------------------

TOGGLER_SVA = ("hold_t: assert property (@(posedge clk) disable iff (!rst_n) "
               "!toggle |=> state == $past(state));")


def _difficulty_client(responses_by_index):
    def fn(template_id, rendered, index):
        assert template_id == "nl2sva"
        return responses_by_index[index]

    return LlmClient(audit=AuditLog(),
                     backend_factory=lambda p: CallableBackend(fn))


def _difficulty_cfg():
    profile = BackendProfile(name="weak", kind="mock", fixture="unused")
    return StageConfig(bound=Bound(max_len=3), backends={"weak": profile},
                       difficulty_samples=5)


def _toggler():
    src = (DATA / "designs" / "toggler.v").read_text()
    return curate([parse_design(src, name="toggler")]).kept[0]


def _record():
    rec = PipelineRecord(id="toggler:0", design_ref="toggler",
                         nl_text="state holds when toggle is low")
    rec.sva_text = TOGGLER_SVA
    return rec


def equivalent_sample(label):
    return (f"```\n{label}: assert property (@(posedge clk) disable iff "
            "(!rst_n) !toggle |=> state == $past(state));\n```")


def test_all_samples_equivalent_drops_record():
    client = _difficulty_client({i: equivalent_sample(f"s{i}")
                                 for i in range(5)})
    [rec] = stage_difficulty([_record()], _difficulty_cfg(), client,
                             {"toggler": _toggler()})
    assert not rec.alive
    assert rec.drop_reason == "trivial"


def test_one_unparseable_sample_keeps_record():
    responses = {i: equivalent_sample(f"s{i}") for i in range(4)}
    responses[4] = "cannot express this"
    client = _difficulty_client(responses)
    [rec] = stage_difficulty([_record()], _difficulty_cfg(), client,
                             {"toggler": _toggler()})
    assert rec.alive


def test_no_parseable_samples_keeps_record():
    client = _difficulty_client({i: f"prose only {i}" for i in range(5)})
    [rec] = stage_difficulty([_record()], _difficulty_cfg(), client,
                             {"toggler": _toggler()})
    assert rec.alive


def test_inequivalent_sample_keeps_record():
    responses = {i: equivalent_sample(f"s{i}") for i in range(5)}
    responses[2] = ("```\nd: assert property (@(posedge clk) disable iff "
                    "(!rst_n) toggle |=> state == $past(state));\n```")
    client = _difficulty_client(responses)
    [rec] = stage_difficulty([_record()], _difficulty_cfg(), client,
                             {"toggler": _toggler()})
    assert rec.alive


# -- export ---------------------------------------------------------------------

def test_export_decontaminates_planted_overlap(tmp_path):
    designs = {"toggler": _toggler()}
    recs = []
    for i, nl in enumerate(["one two three four five six seven eight nine "
                            "ten eleven twelve thirteen fourteen",
                            "an unrelated sentence"]):
        rec = PipelineRecord(id=f"toggler:{i}", design_ref="toggler",
                             nl_text=nl)
        rec.reasoning = "r"
        rec.final_sva = TOGGLER_SVA
        recs.append(rec)
    bench = ["xxx one two three four five six seven eight nine ten eleven "
             "twelve thirteen yyy"]
    report = export_sft(recs, designs, tmp_path / "sft.jsonl", bench)
    assert report == {"exported": 1, "decontaminated": 1,
                      "path": str(tmp_path / "sft.jsonl")}
    rows = [json.loads(ln) for ln in
            (tmp_path / "sft.jsonl").read_text().splitlines()]
    assert rows[0]["meta"]["id"] == "toggler:1"
