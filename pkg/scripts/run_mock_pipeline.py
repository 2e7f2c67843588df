#!/usr/bin/env python3
"""Run the full synthesis pipeline on the bundled 3-design fixture.

Demonstrates the whole flow offline: curation, proof-filtered
generation, bidirectional selection, judging, difficulty filtering,
reasoning augmentation, and SFT export — all against the shipped mock
backend, so the run is deterministic and needs no network.

Usage: python scripts/run_mock_pipeline.py [workdir]
"""

import json
import sys
from pathlib import Path

from svaforge.config import load_config
from svaforge.gateway import AuditLog, LlmClient
from svaforge.pipeline import run

DATA = Path(__file__).resolve().parents[1] / "src" / "svaforge" / "data"


def main():
    workdir = Path(sys.argv[1] if len(sys.argv) > 1 else "mock_run")
    workdir.mkdir(parents=True, exist_ok=True)
    cfg = load_config(DATA / "mock_config.json")
    client = LlmClient(audit=AuditLog(workdir / "audit.log"))
    summary = run(cfg.manifest, cfg.stage, workdir, client)
    print(json.dumps(summary, indent=2, sort_keys=True))
    export = workdir / "sft.jsonl"
    print(f"\nexported records ({export}):")
    for line in export.read_text().splitlines():
        row = json.loads(line)
        print(f"  {row['meta']['id']}: label starts "
              f"{row['label'][:60]!r}...")


if __name__ == "__main__":
    main()
