"""Prompt assembly from shipped golden templates.

Builders are pure string operations: identical inputs render byte-identical
prompts. Slot filling uses literal replacement, never str.format, so braces
inside reward code cannot corrupt a template.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from ..schema import EnvironmentSchema, render_abstraction, render_knowledge

DEFAULT_TEMPERATURE = 0.7

_TASK_MARKER = "I want you to fulfill the following task:"


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    user_text: str
    temperature: float = DEFAULT_TEMPERATURE
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be in [0, 2], got {self.temperature}")

    def messages(self) -> list[dict]:
        msgs = []
        if self.system_text:
            msgs.append({"role": "system", "content": self.system_text})
        msgs.append({"role": "user", "content": self.user_text})
        return msgs


@lru_cache(maxsize=None)
def template(name: str) -> str:
    path = Path(resources.files("t2r.genloop") / "data" / "templates" / f"{name}.txt")
    return path.read_text(encoding="utf-8")


def _fill(text: str, slots: dict[str, str]) -> str:
    for key, value in slots.items():
        text = text.replace("{" + key + "}", value)
    return text


def build_zero_shot_prompt(
    abstraction_text: str,
    instruction: str,
    knowledge_notes: Iterable[str] = (),
    metadata: dict | None = None,
    temperature: float = DEFAULT_TEMPERATURE,
) -> PromptBundle:
    """Instantiate the zero-shot template: {abstraction}, {knowledge}, and
    {instruction} slots filled, byte-deterministic."""
    user = _fill(
        template("zero_shot"),
        {
            "abstraction": abstraction_text.rstrip("\n"),
            "knowledge": render_knowledge(knowledge_notes),
            "instruction": instruction,
        },
    )
    return PromptBundle(system_text="", user_text=user, temperature=temperature,
                        metadata=dict(metadata or {}))


def build_few_shot_block(entries: Sequence) -> str:
    """Concatenated per-entry example blocks (instruction + fenced reward
    code), order preserved."""
    if not entries:
        raise ValueError("few-shot block needs at least one entry")
    blocks = []
    for entry in entries:
        blocks.append(
            _fill(
                template("few_shot_block"),
                {"instruction": entry.instruction, "reward_code": entry.reward_source.rstrip("\n")},
            )
        )
    return "\n".join(blocks)


def build_few_shot_prompt(
    abstraction_text: str,
    instruction: str,
    entries: Sequence,
    knowledge_notes: Iterable[str] = (),
    metadata: dict | None = None,
    temperature: float = DEFAULT_TEMPERATURE,
) -> PromptBundle:
    """Zero-shot prompt with retrieved example blocks inserted ahead of the
    task section."""
    base = build_zero_shot_prompt(
        abstraction_text, instruction, knowledge_notes, metadata, temperature
    )
    block = build_few_shot_block(entries)
    marker_at = base.user_text.index(_TASK_MARKER)
    user = base.user_text[:marker_at] + block + "\n" + base.user_text[marker_at:]
    return PromptBundle(system_text="", user_text=user, temperature=temperature,
                        metadata=dict(metadata or {}))


def build_feedback_prompt(
    prev_source: str,
    description: str,
    feedback: str,
    metadata: dict | None = None,
    temperature: float = DEFAULT_TEMPERATURE,
) -> PromptBundle:
    """Instantiate the interactive-improvement template around the previous
    round's code, the rollout description, and the human feedback."""
    if not prev_source.strip():
        raise ValueError("feedback prompt requires the previous reward source")
    user = _fill(
        template("feedback"),
        {
            "generated_code": prev_source.rstrip("\n"),
            "description": description,
            "feedback": feedback,
        },
    )
    return PromptBundle(system_text="", user_text=user, temperature=temperature,
                        metadata=dict(metadata or {}))


def abstraction_for_prompt(schema: EnvironmentSchema) -> str:
    """The class-block portion of the abstraction; the knowledge list is
    rendered by the prompt template's own slot."""
    return render_abstraction(schema, include_knowledge=False)
