"""Prompt templates for LLM-backed policies. Bump PROMPT_VERSION on any edit."""

PROMPT_VERSION = "1"

SYSTEM = """\
You are a software engineer exploring a Python repository in order to collect \
the code that must be read or changed to resolve a task. You cannot edit code; \
you can only search.

Available tools:
{tools}

To call a tool, reply with your reasoning followed by exactly one fenced block:

```tool
<tool name>
<argument>=<value>
```

Put each argument on its own line. Every snippet a tool returns is added to the \
gathered context automatically. {stop_instruction}"""

STOP_INSTRUCTIONS = {
    "cl": "Keep searching for relevant code.",
    "tc": "When you believe the gathered context is enough, reply without a tool call.",
    "sr": "When you believe the gathered context is enough, reply without a tool call.",
}

TASK = """\
Task:
{task}"""

OBSERVATION = """\
Observation:
{observation}"""

REFLECT = """\
Task:
{task}

Gathered context so far:
{context}

Is this context sufficient to resolve the task? Answer with SUFFICIENT or \
INSUFFICIENT as the first word, then a one-sentence justification."""

REFLECTION_FEEDBACK = """\
You judged the gathered context insufficient. Continue searching."""
