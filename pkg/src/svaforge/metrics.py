"""Evaluation and corpus analytics.

Functional pass-rate estimation with exact binomials, token n-gram
TF-IDF corpus diversity, long-n-gram decontamination against a
benchmark, and end-to-end counting of extracted / parseable / proven
assertions in raw model output.
"""

from __future__ import annotations

import logging
import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from .errors import BackendError, BoundExceeded
from .gateway import LlmClient, NlProperty
from .sva.lexer import tokenize_loose
from .sva.parser import extract_assertions
from .verify import Bound, Outcome, equivalent, holds_on_design

log = logging.getLogger(__name__)


@dataclass
class EvalResult:
    problem_id: str
    n: int  # samples drawn
    c: int  # samples equivalent to ground truth
    details: List[Tuple[bool, str]] = field(default_factory=list)
    # (syntax ok?, verdict) per sample

    def __post_init__(self):
        if self.c > self.n:
            raise ValueError("c cannot exceed n")


def func_at_k(results: Sequence[EvalResult], k: int) -> float:
    """Mean over problems of 1 - C(n-c, k) / C(n, k), exactly.

    The per-problem value is the chance that a uniformly drawn size-k
    subset of the n samples contains at least one correct one; when
    n - c < k no all-incorrect subset exists and the value is 1.
    """
    if not results:
        raise ValueError("no results")
    total = Fraction(0)
    for r in results:
        if k > r.n:
            raise ValueError(f"k={k} exceeds n={r.n} for {r.problem_id}")
        total += 1 - Fraction(math.comb(r.n - r.c, k), math.comb(r.n, k))
    return float(total / len(results))


def evaluate(problems: Sequence[tuple], client: LlmClient, profile, n: int,
             bound: Bound = Bound(), reset_ticks: int = 1) -> List[EvalResult]:
    """Sample n translations per (design, nl, ground-truth) problem and
    count the ones bounded-equivalent to the ground truth under the
    design. Backend failures count as incorrect samples."""
    results = []
    for idx, problem in enumerate(problems):
        design, nl, truth = problem[:3]
        x = nl if isinstance(nl, NlProperty) else NlProperty(str(nl), "manual")
        pid = problem[3] if len(problem) > 3 else f"{design.name}#{idx}"
        details: List[Tuple[bool, str]] = []
        c = 0
        try:
            samples = client.nl2sva_samples(profile, design, x, n)
        except BackendError as exc:
            log.warning("evaluate %s: backend failure (%s)", pid, exc)
            samples = [(None, None)] * n
        for raw, parsed in samples:
            if parsed is None:
                details.append((False, "unparsed"))
                continue
            try:
                rep = equivalent(parsed, truth, bound, design=design,
                                 reset_ticks=reset_ticks)
            except BoundExceeded as exc:
                log.warning("evaluate %s: %s", pid, exc)
                details.append((True, "bound"))
                continue
            details.append((True, rep.outcome.value))
            if rep.outcome is Outcome.EQUIVALENT:
                c += 1
        results.append(EvalResult(pid, n, c, details))
    return results


# --------------------------------------------------------------------------
# Diversity
# --------------------------------------------------------------------------

def _ngrams(text: str, n: int) -> Dict[tuple, int]:
    tokens = tokenize_loose(text)
    counts: Dict[tuple, int] = {}
    for i in range(len(tokens) - n + 1):
        g = tuple(tokens[i:i + n])
        counts[g] = counts.get(g, 0) + 1
    return counts


def tfidf_diversity(corpus: Sequence[str], n_gram: int = 3,
                    pair_cap: Optional[int] = None, seed: int = 0) -> float:
    """Mean pairwise (1 - cosine) distance between token n-gram TF-IDF
    vectors; TF is the raw count, IDF is ln(N/df) + 1."""
    if len(corpus) < 2:
        raise ValueError("corpus must contain at least 2 documents")
    docs = [_ngrams(text, n_gram) for text in corpus]
    df: Dict[tuple, int] = {}
    for d in docs:
        for g in d:
            df[g] = df.get(g, 0) + 1
    n_docs = len(docs)
    vecs = [{g: tf * (math.log(n_docs / df[g]) + 1.0) for g, tf in d.items()}
            for d in docs]
    sq_norms = [sum(w * w for w in v.values()) for v in vecs]
    pairs = [(i, j) for i in range(n_docs) for j in range(i + 1, n_docs)]
    if pair_cap is not None and len(pairs) > pair_cap:
        pairs = random.Random(seed).sample(pairs, pair_cap)
    total = 0.0
    for i, j in pairs:
        total += 1.0 - _cosine(vecs[i], sq_norms[i], vecs[j], sq_norms[j])
    return total / len(pairs)


def _cosine(u: dict, nu2: float, v: dict, nv2: float) -> float:
    if u == v:
        return 1.0  # identical vectors, exactly (covers two empty docs)
    if nu2 == 0.0 or nv2 == 0.0:
        return 0.0
    if len(v) < len(u):
        u, v = v, u
    dot = sum(w * v[g] for g, w in u.items() if g in v)
    return dot / math.sqrt(nu2 * nv2)


# --------------------------------------------------------------------------
# Decontamination
# --------------------------------------------------------------------------

def norm_tokens(text: str) -> List[str]:
    """Lowercase and split on any run of non-alphanumeric characters."""
    return [t for t in re.split(r"[^a-z0-9]+", text.lower()) if t]


class DecontamReport(NamedTuple):
    kept: List[str]
    dropped: List[str]
    overlaps: List[Tuple[int, str]]  # (train index, one offending n-gram)


def decontaminate(train: Sequence[str], bench: Sequence[str],
                  n: int = 13) -> DecontamReport:
    """Drop every training string sharing a normalized n-gram with the
    benchmark; each drop reports one offending n-gram."""
    if n < 1:
        raise ValueError("n must be >= 1")
    bench_grams = set()
    for text in bench:
        toks = norm_tokens(text)
        for i in range(len(toks) - n + 1):
            bench_grams.add(tuple(toks[i:i + n]))
    kept: List[str] = []
    dropped: List[str] = []
    overlaps: List[Tuple[int, str]] = []
    for idx, text in enumerate(train):
        toks = norm_tokens(text)
        hit = None
        for i in range(len(toks) - n + 1):
            g = tuple(toks[i:i + n])
            if g in bench_grams:
                hit = g
                break
        if hit is None:
            kept.append(text)
        else:
            dropped.append(text)
            overlaps.append((idx, " ".join(hit)))
    return DecontamReport(kept, dropped, overlaps)


# --------------------------------------------------------------------------
# End-to-end counting
# --------------------------------------------------------------------------

class CountReport(NamedTuple):
    sva: int  # candidates extracted
    syn_correct: int  # candidates that parse
    proven: int  # parsed candidates that hold on the design
    tautology_flags: int  # proven ones that also hold on free traces


def count_e2e(responses: Sequence[str], design, bound: Bound = Bound(),
              reset_ticks: int = 1) -> CountReport:
    """Count extracted, parseable, and design-proven assertions across
    raw responses. Tautologies still count as proven (a prover would
    pass them too); the flag count is reported alongside."""
    n_sva = n_syn = n_proven = n_taut = 0
    for response in responses:
        for cand in extract_assertions(response):
            n_sva += 1
            if cand.assertion is None:
                continue
            n_syn += 1
            try:
                rep = holds_on_design(cand.assertion, design, bound,
                                      reset_ticks=reset_ticks)
            except Exception as exc:  # unknown signals, bound, ...
                log.info("count_e2e: %s not checkable (%s)",
                         cand.assertion.label, exc)
                continue
            if rep.outcome.value == "holds":
                n_proven += 1
                if rep.tautology_flag:
                    n_taut += 1
    return CountReport(n_sva, n_syn, n_proven, n_taut)
