"""Retrieval strategies: the BM25 baseline and ReAct agents with CL/TC/SR stopping."""

from ctxlab.agent.context import ContextItem, ContextSet, add_to_context
from ctxlab.agent.loop import (
    AgentRunAborted,
    RunResult,
    StopReason,
    StrategyConfig,
    check_stop_cl,
    check_stop_tc,
    run_baseline,
    run_react,
    self_reflect,
)
from ctxlab.agent.policies import Policy, RemotePolicy, ScriptedPolicy, ScriptedPolicySet
from ctxlab.agent.protocol import MalformedCall, ToolCall, TranscriptStep, Verdict, parse_tool_call, parse_verdict

__all__ = [
    "AgentRunAborted",
    "ContextItem",
    "ContextSet",
    "MalformedCall",
    "Policy",
    "RemotePolicy",
    "RunResult",
    "ScriptedPolicy",
    "ScriptedPolicySet",
    "StopReason",
    "StrategyConfig",
    "ToolCall",
    "TranscriptStep",
    "Verdict",
    "add_to_context",
    "check_stop_cl",
    "check_stop_tc",
    "parse_tool_call",
    "parse_verdict",
    "run_baseline",
    "run_react",
    "self_reflect",
]
