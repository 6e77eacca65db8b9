"""Retrieval strategies: single-shot BM25 baseline and the ReAct loop."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ctxlab.agent.context import ContextSet
from ctxlab.agent.policies import Policy
from ctxlab.agent.protocol import MalformedCall, TranscriptStep, Verdict, parse_tool_call, parse_verdict
from ctxlab.corpus import APPROXIMATE, TokenCounterConfig
from ctxlab.errors import ConfigError, PolicyTransportError
from ctxlab.retrieval import Bm25Index, ToolRegistry

TOOLSETS = ("bm25", "acr")
STOPPINGS = ("baseline", "cl", "tc", "sr")


class StopReason(str, enum.Enum):
    CRITERION_MET = "criterion_met"
    NO_TOOL_CALL = "no_tool_call"
    REFLECTION_SUFFICIENT = "reflection_sufficient"
    STEP_LIMIT = "step_limit"


@dataclass(frozen=True)
class StrategyConfig:
    toolset: str = "bm25"
    stopping: str = "tc"
    context_threshold_tokens: int = 500
    max_steps: int = 25
    top_k: int = 5

    def __post_init__(self) -> None:
        if self.toolset not in TOOLSETS:
            raise ConfigError(f"unknown toolset {self.toolset!r}")
        if self.stopping not in STOPPINGS:
            raise ConfigError(f"unknown stopping criterion {self.stopping!r}")
        if self.stopping == "baseline" and self.toolset != "bm25":
            raise ConfigError("the baseline strategy is defined only with the bm25 toolset")
        if self.max_steps < 1 or self.top_k < 1 or self.context_threshold_tokens < 0:
            raise ConfigError("max_steps and top_k must be >= 1, threshold >= 0")

    @property
    def label(self) -> str:
        return "baseline" if self.stopping == "baseline" else f"react+{self.stopping}"

    def to_json(self) -> dict:
        return {
            "toolset": self.toolset,
            "stopping": self.stopping,
            "context_threshold_tokens": self.context_threshold_tokens,
            "max_steps": self.max_steps,
            "top_k": self.top_k,
        }


@dataclass
class RunResult:
    context: ContextSet
    transcript: list[TranscriptStep] = field(default_factory=list)
    stop_reason: StopReason | None = None
    unparsed_verdicts: int = 0


class AgentRunAborted(Exception):
    """Policy transport failed mid-run; ``partial`` holds what was gathered."""

    def __init__(self, cause: PolicyTransportError, partial: RunResult):
        super().__init__(str(cause))
        self.partial = partial


def check_stop_cl(context: ContextSet, threshold: int) -> bool:
    return context.total_tokens >= threshold


def check_stop_tc(step: TranscriptStep) -> bool:
    # a malformed call still counts as an attempt to act
    return not step.attempted_call


def self_reflect(policy: Policy, task: str, transcript: list[TranscriptStep], context: ContextSet) -> tuple[Verdict, str, bool]:
    """Ask the policy whether ``context`` suffices.

    Returns (verdict, raw reply, parsed). Unparseable replies count as
    insufficient.
    """
    reply = policy.reflect(task, transcript, context.summary())
    verdict = parse_verdict(reply)
    return (verdict or Verdict.INSUFFICIENT), reply, verdict is not None


def run_baseline(index: Bm25Index, task: str, config: StrategyConfig, counter: TokenCounterConfig = APPROXIMATE) -> ContextSet:
    context = ContextSet(counter=counter)
    if not len(index):
        return context
    for hit in index.search(task, len(index)):
        if check_stop_cl(context, config.context_threshold_tokens):
            break
        context = context.add([hit])
    return context


def run_react(
    registry: ToolRegistry,
    task: str,
    policy: Policy,
    config: StrategyConfig,
    counter: TokenCounterConfig = APPROXIMATE,
) -> RunResult:
    if config.stopping == "baseline":
        raise ConfigError("run_react needs a cl, tc or sr stopping criterion")
    result = RunResult(ContextSet(counter=counter))
    tools = registry.describe()

    for step_index in range(1, config.max_steps + 1):
        try:
            output = policy.next_output(task, result.transcript, tools)
        except PolicyTransportError as exc:
            raise AgentRunAborted(exc, result) from exc
        step = TranscriptStep(step_index, output)
        try:
            step.parsed_call = parse_tool_call(output, registry)
        except MalformedCall as exc:
            step.parse_error = str(exc)
            step.observation = f"Could not parse tool call: {exc}"
        if step.parsed_call is not None:
            tool_result = registry.call(step.parsed_call.tool_name, step.parsed_call.arguments)
            step.observation = tool_result.render()
            result.context = result.context.add(tool_result.hits)
        result.transcript.append(step)

        if config.stopping == "cl":
            if check_stop_cl(result.context, config.context_threshold_tokens):
                result.stop_reason = StopReason.CRITERION_MET
                return result
        elif check_stop_tc(step):
            if config.stopping == "tc":
                result.stop_reason = StopReason.NO_TOOL_CALL
                return result
            try:
                verdict, reply, parsed = self_reflect(policy, task, result.transcript, result.context)
            except PolicyTransportError as exc:
                raise AgentRunAborted(exc, result) from exc
            step.reflection = reply
            result.unparsed_verdicts += not parsed
            if verdict is Verdict.SUFFICIENT:
                result.stop_reason = StopReason.REFLECTION_SUFFICIENT
                return result

    result.stop_reason = StopReason.STEP_LIMIT
    return result
