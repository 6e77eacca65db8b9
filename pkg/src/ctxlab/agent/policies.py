"""Decision sources for the ReAct loop."""

from __future__ import annotations

import hashlib
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import httpx

from ctxlab.agent import prompts
from ctxlab.agent.protocol import TranscriptStep
from ctxlab.errors import ConfigError, PolicyTransportError

ENV_URL = "CTXLAB_API_URL"
ENV_KEY = "CTXLAB_API_KEY"
ENV_MODEL = "CTXLAB_MODEL"
DEFAULT_MODEL = "gpt-3.5-turbo-16k"

STEP_MARKER = "=== step ==="
REFLECTIONS_MARKER = "=== reflections ==="


class Policy(Protocol):
    def next_output(self, task: str, transcript: Sequence[TranscriptStep], tools: str) -> str: ...

    def reflect(self, task: str, transcript: Sequence[TranscriptStep], context_summary: str) -> str: ...

    def describe(self) -> str: ...


@dataclass(frozen=True)
class ScriptedPolicy:
    """Replays fixed outputs.

    The reply is selected purely from the transcript length (and the number
    of reflections already in it), so identical inputs give identical
    outputs. An exhausted script yields ``""``, i.e. prose without a call.
    """

    outputs: tuple[str, ...]
    reflections: tuple[str, ...] = ()
    name: str = "scripted"

    def next_output(self, task: str, transcript: Sequence[TranscriptStep], tools: str) -> str:
        n = len(transcript)
        return self.outputs[n] if n < len(self.outputs) else ""

    def reflect(self, task: str, transcript: Sequence[TranscriptStep], context_summary: str) -> str:
        n = sum(1 for s in transcript if s.reflection is not None)
        return self.reflections[n] if n < len(self.reflections) else ""

    def describe(self) -> str:
        return self.name

    @classmethod
    def parse(cls, text: str, name: str = "scripted") -> ScriptedPolicy:
        """Parse the trace format.

        Each ``=== step ===`` line opens one policy output; an optional
        ``=== reflections ===`` section lists one verdict reply per line.
        Text before the first marker is ignored.
        """
        outputs: list[str] = []
        reflections: list[str] = []
        section: str | None = None
        buf: list[str] = []

        def flush() -> None:
            if section == "step":
                outputs.append("\n".join(buf).strip("\n"))

        for line in text.splitlines():
            marker = line.strip()
            if marker == STEP_MARKER:
                flush()
                section, buf = "step", []
            elif marker == REFLECTIONS_MARKER:
                flush()
                section, buf = "reflections", []
            elif section == "step":
                buf.append(line)
            elif section == "reflections" and marker:
                reflections.append(marker)
        flush()
        return cls(tuple(outputs), tuple(reflections), name)

    @classmethod
    def load(cls, path: Path | str) -> ScriptedPolicy:
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        digest = hashlib.sha256(text.encode()).hexdigest()[:12]
        return cls.parse(text, name=f"scripted:{path.name}@{digest}")


class ScriptedPolicySet:
    """Per-instance scripts: a directory of ``<instance_id>.trace`` files or one shared file."""

    def __init__(self, path: Path | str):
        self.path = Path(path)
        if not self.path.exists():
            raise ConfigError(f"scripted policy path not found: {self.path}")

    def for_instance(self, instance_id: str) -> ScriptedPolicy:
        if self.path.is_dir():
            trace = self.path / f"{instance_id}.trace"
            if not trace.exists():
                return ScriptedPolicy((), name=f"scripted:missing:{instance_id}")
            return ScriptedPolicy.load(trace)
        return ScriptedPolicy.load(self.path)

    def describe(self) -> str:
        h = hashlib.sha256()
        files = sorted(self.path.glob("*.trace")) if self.path.is_dir() else [self.path]
        for f in files:
            h.update(f.name.encode())
            h.update(f.read_bytes())
        return f"scripted:{self.path.name}@{h.hexdigest()[:12]}"


@dataclass
class RemotePolicy:
    """Chat-completions style HTTP backend."""

    url: str
    model: str = DEFAULT_MODEL
    api_key: str | None = None
    stopping: str = "tc"
    temperature: float = 0.0
    timeout: float = 120.0
    retries: int = 2
    client: httpx.Client | None = field(default=None, repr=False)

    @classmethod
    def from_env(cls, stopping: str = "tc", **kwargs) -> RemotePolicy:
        url = os.environ.get(ENV_URL)
        if not url:
            raise ConfigError(f"remote policy needs ${ENV_URL}")
        return cls(url=url, model=os.environ.get(ENV_MODEL, DEFAULT_MODEL), api_key=os.environ.get(ENV_KEY), stopping=stopping, **kwargs)

    def describe(self) -> str:
        return f"remote:{self.model}@{self.url}"

    def _messages(self, task: str, transcript: Sequence[TranscriptStep], tools: str) -> list[dict]:
        system = prompts.SYSTEM.format(tools=tools, stop_instruction=prompts.STOP_INSTRUCTIONS.get(self.stopping, ""))
        messages = [{"role": "system", "content": system}, {"role": "user", "content": prompts.TASK.format(task=task)}]
        for step in transcript:
            messages.append({"role": "assistant", "content": step.policy_output})
            if step.observation:
                messages.append({"role": "user", "content": prompts.OBSERVATION.format(observation=step.observation)})
            if step.reflection is not None:
                messages.append({"role": "user", "content": prompts.REFLECTION_FEEDBACK})
        return messages

    def _complete(self, messages: list[dict]) -> str:
        payload = {"model": self.model, "messages": messages, "temperature": self.temperature}
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        client = self.client or httpx.Client(timeout=self.timeout)
        last: Exception | None = None
        try:
            for attempt in range(self.retries + 1):
                try:
                    resp = client.post(self.url, json=payload, headers=headers)
                    resp.raise_for_status()
                    return resp.json()["choices"][0]["message"]["content"] or ""
                except (httpx.HTTPError, ValueError, KeyError, IndexError, TypeError) as exc:
                    last = exc
                    if attempt < self.retries:
                        time.sleep(min(2**attempt, 10))
        finally:
            if self.client is None:
                client.close()
        raise PolicyTransportError(f"policy request failed: {last}") from last

    def next_output(self, task: str, transcript: Sequence[TranscriptStep], tools: str) -> str:
        return self._complete(self._messages(task, transcript, tools))

    def reflect(self, task: str, transcript: Sequence[TranscriptStep], context_summary: str) -> str:
        content = prompts.REFLECT.format(task=task, context=context_summary)
        return self._complete([{"role": "user", "content": content}])
