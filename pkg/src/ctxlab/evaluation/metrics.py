"""Localization metrics, macro aggregation and correlation statistics."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import AbstractSet, Hashable, Iterable, Sequence

from ctxlab.errors import CtxlabError, EmptyGoldError, UndefinedCorrelationError

SCOPES = ("file", "entity")

# ordinal reasoning complexity, pooled across toolsets
REASONING_LEVELS = {"baseline": 0, "cl": 1, "tc": 2, "sr": 3, "acr": 4}


def prf(retrieved: AbstractSet[Hashable], gold: AbstractSet[Hashable]) -> tuple[float, float, float]:
    """Precision, recall and F1 of ``retrieved`` against ``gold``.

    Raises EmptyGoldError when ``gold`` is empty; such instances are
    excluded from aggregation rather than scored.
    """
    if not gold:
        raise EmptyGoldError("gold set is empty")
    hit = len(retrieved & gold)
    precision = hit / len(retrieved) if retrieved else 0.0
    recall = hit / len(gold)
    # equals 2PR/(P+R) but rounds once
    f1 = 2 * hit / (len(retrieved) + len(gold))
    return precision, recall, f1


@dataclass(frozen=True)
class InstanceMetrics:
    scope: str
    precision: float
    recall: float
    f1: float
    context_tokens: int


@dataclass
class InstanceScores:
    """Both scopes for one instance; a scope is None when its gold set was empty."""

    instance_id: str
    context_tokens: int
    file: InstanceMetrics | None = None
    entity: InstanceMetrics | None = None
    flags: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"instance_id": self.instance_id, "context_tokens": self.context_tokens}
        for scope in SCOPES:
            m = getattr(self, scope)
            out[scope] = None if m is None else {"precision": m.precision, "recall": m.recall, "f1": m.f1}
        out["flags"] = list(self.flags)
        return out


def score_instance(
    instance_id: str,
    context_tokens: int,
    retrieved: dict[str, AbstractSet[Hashable]],
    gold: dict[str, AbstractSet[Hashable]],
) -> InstanceScores:
    scores = InstanceScores(instance_id, context_tokens)
    for scope in SCOPES:
        try:
            p, r, f = prf(retrieved[scope], gold[scope])
        except EmptyGoldError:
            scores.flags.append(f"empty_gold_{scope}")
            continue
        setattr(scores, scope, InstanceMetrics(scope, p, r, f, context_tokens))
    return scores


@dataclass
class ScopeMeans:
    precision: float
    recall: float
    f1: float
    n: int


@dataclass
class AggregateReport:
    """One strategy row: macro means per scope plus mean context length."""

    dataset: str
    toolset: str
    stopping: str
    file: ScopeMeans | None
    entity: ScopeMeans | None
    avg_context_tokens: float
    n_instances: int
    excluded: dict[str, int] = field(default_factory=dict)
    averaging: str = "macro"

    @property
    def reasoning_level(self) -> int:
        return REASONING_LEVELS[self.stopping]

    @property
    def label(self) -> str:
        return {"baseline": "Baseline", "cl": "ReAct + CL", "tc": "ReAct + TC", "sr": "ReAct + SR", "acr": "ACR (custom)"}[self.stopping]

    def metric(self, scope: str, name: str) -> float | None:
        means = getattr(self, scope)
        return None if means is None else getattr(means, name)

    def to_json(self) -> dict:
        out = asdict(self)
        out["reasoning_level"] = self.reasoning_level
        return out

    @classmethod
    def from_json(cls, data: dict) -> AggregateReport:
        scopes = {s: ScopeMeans(**data[s]) if data.get(s) else None for s in SCOPES}
        return cls(
            dataset=data["dataset"],
            toolset=data["toolset"],
            stopping=data["stopping"],
            avg_context_tokens=data["avg_context_tokens"],
            n_instances=data["n_instances"],
            excluded=dict(data.get("excluded", {})),
            averaging=data.get("averaging", "macro"),
            **scopes,
        )


class AggregationError(CtxlabError):
    pass


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def aggregate(scores: Sequence[InstanceScores], dataset: str = "", toolset: str = "", stopping: str = "tc") -> AggregateReport:
    """Unweighted mean of every metric over instances, per scope."""
    if not scores:
        raise AggregationError("cannot aggregate zero instances")
    per_scope: dict[str, ScopeMeans | None] = {}
    excluded = {}
    for scope in SCOPES:
        ms = [getattr(s, scope) for s in scores if getattr(s, scope) is not None]
        excluded[scope] = len(scores) - len(ms)
        per_scope[scope] = (
            ScopeMeans(_mean([m.precision for m in ms]), _mean([m.recall for m in ms]), _mean([m.f1 for m in ms]), len(ms))
            if ms
            else None
        )
    return AggregateReport(
        dataset=dataset,
        toolset=toolset,
        stopping=stopping,
        avg_context_tokens=_mean([s.context_tokens for s in scores]),
        n_instances=len(scores),
        excluded=excluded,
        **per_scope,
    )


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    if len(x) != len(y):
        raise ValueError("pearson needs equal-length inputs")
    if len(x) < 2:
        raise UndefinedCorrelationError("pearson needs at least two points")
    mx, my = _mean(x), _mean(y)
    dx = [v - mx for v in x]
    dy = [v - my for v in y]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    if sxx == 0 or syy == 0:
        raise UndefinedCorrelationError("correlation undefined for a constant vector")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


CORRELATION_PAIRS = {
    "precision_vs_reasoning": ("precision", "reasoning"),
    "recall_vs_reasoning": ("recall", "reasoning"),
    "precision_vs_ctxlen": ("precision", "ctxlen"),
    "recall_vs_ctxlen": ("recall", "ctxlen"),
}


def correlation_report(rows: Iterable[AggregateReport]) -> dict:
    """Pearson correlations over strategy rows, per scope.

    Each pair maps scope -> coefficient, or an ``{"error": ...}`` entry when
    the correlation is undefined for that pair.
    """
    rows = list(rows)
    if len(rows) < 2:
        raise UndefinedCorrelationError("correlation report needs at least two strategy rows")
    out: dict = {"encoding": dict(REASONING_LEVELS), "n_rows": len(rows)}
    for name, (metric, against) in CORRELATION_PAIRS.items():
        out[name] = {}
        for scope in SCOPES:
            usable = [r for r in rows if r.metric(scope, metric) is not None]
            ys = [r.metric(scope, metric) for r in usable]
            xs = [float(r.reasoning_level) if against == "reasoning" else r.avg_context_tokens for r in usable]
            try:
                out[name][scope] = pearson(xs, ys)
            except UndefinedCorrelationError as exc:
                out[name][scope] = {"error": str(exc)}
    return out
