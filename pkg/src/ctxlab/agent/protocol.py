"""Tool-call syntax shared by scripted and remote policies.

A call is a single fenced block whose info string is empty or ``tool``; the
first non-blank line names the tool and each following line is ``key=value``::

    ```tool
    search_class
    class_name=Field
    ```

Fenced blocks with any other info string (``python``, ``diff`` ...) are
ordinary prose. Output containing no call block is a no-tool-call step.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from ctxlab.retrieval import ToolRegistry

_FENCE = re.compile(r"^```[ \t]*(\w*)[ \t]*\n(.*?)^```[ \t]*$", re.MULTILINE | re.DOTALL)


@dataclass(frozen=True)
class ToolCall:
    tool_name: str
    arguments: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"tool_name": self.tool_name, "arguments": dict(sorted(self.arguments.items()))}


class Verdict(str, enum.Enum):
    SUFFICIENT = "sufficient"
    INSUFFICIENT = "insufficient"


@dataclass
class TranscriptStep:
    step_index: int
    policy_output: str
    parsed_call: ToolCall | None = None
    parse_error: str | None = None
    observation: str = ""
    reflection: str | None = None  # raw self-reflection reply, SR runs only

    @property
    def attempted_call(self) -> bool:
        return self.parsed_call is not None or self.parse_error is not None

    def to_json(self) -> dict:
        return {
            "step_index": self.step_index,
            "policy_output": self.policy_output,
            "parsed_call": self.parsed_call.to_json() if self.parsed_call else None,
            "parse_error": self.parse_error,
            "observation": self.observation,
            "reflection": self.reflection,
        }


class MalformedCall(ValueError):
    pass


def parse_tool_call(output: str, registry: ToolRegistry) -> ToolCall | None:
    """The call in ``output``, or None when the output is pure prose.

    Raises MalformedCall when a call block is present but invalid.
    """
    blocks = [m for m in _FENCE.finditer(output) if m.group(1) in ("", "tool")]
    if not blocks:
        return None
    if len(blocks) > 1:
        raise MalformedCall(f"expected one tool call block, found {len(blocks)}")
    body = [line.strip() for line in blocks[0].group(2).splitlines()]
    body = [line for line in body if line]
    if not body:
        raise MalformedCall("empty tool call block")
    name, arg_lines = body[0], body[1:]
    if name not in registry:
        raise MalformedCall(f"unknown tool {name!r}; available: {', '.join(registry.tools)}")
    args = {}
    for line in arg_lines:
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise MalformedCall(f"argument line is not key=value: {line!r}")
        if key in args:
            raise MalformedCall(f"duplicate argument {key!r}")
        args[key] = value.strip()
    expected = set(registry[name].params)
    if set(args) != expected:
        raise MalformedCall(f"{name} takes arguments {sorted(expected)}, got {sorted(args)}")
    return ToolCall(name, args)


def parse_verdict(reply: str) -> Verdict | None:
    """SUFFICIENT / INSUFFICIENT as the first word (trailing punctuation ignored)."""
    words = reply.split()
    if not words:
        return None
    first = words[0].rstrip(".,:;!")
    if first == "SUFFICIENT":
        return Verdict.SUFFICIENT
    if first == "INSUFFICIENT":
        return Verdict.INSUFFICIENT
    return None
