"""Generation with execution-error refinement.

One loop: build prompt, query the transport, extract the fenced code block,
parse and typecheck; on failure, feed the serialized error report back as a
user turn and re-query, until the program verifies or rounds run out. Only
static verification errors re-invoke the LLM; runtime DomainErrors during
training never do.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..rdsl import TypedProgram, parse, typecheck
from ..rdsl.errors import RdslError
from ..schema import EnvironmentSchema
from .library import SkillEntry, retrieve
from .prompts import (
    DEFAULT_TEMPERATURE,
    PromptBundle,
    abstraction_for_prompt,
    build_few_shot_prompt,
    build_zero_shot_prompt,
)

DEFAULT_MAX_ROUNDS = 3


class NoCodeBlock(Exception):
    pass


class RefinementExhausted(Exception):
    def __init__(self, transcript: list["TranscriptTurn"], error_history: list[RdslError]):
        self.transcript = transcript
        self.error_history = error_history
        last = error_history[-1] if error_history else None
        super().__init__(
            f"refinement exhausted after {len(error_history)} error(s); last: {last}"
        )


@dataclass(frozen=True)
class TranscriptTurn:
    role: str  # system | user | assistant
    content: str


@dataclass
class VerifiedReward:
    program: TypedProgram
    rounds_used: int
    transcript: list[TranscriptTurn]
    error_history: list[RdslError] = field(default_factory=list)


_FENCE_RE = re.compile(r"```[a-zA-Z0-9_+-]*\n(.*?)```", re.DOTALL)


def extract_code(llm_response: str) -> str:
    """Contents of the last fenced code block (language tag ignored)."""
    matches = _FENCE_RE.findall(llm_response)
    if not matches:
        raise NoCodeBlock("response contains no fenced code block")
    return matches[-1].strip("\n") + "\n"


def _refinement_turn(err_json: str) -> str:
    return (
        "Executing the reward code failed verification with the following error report:\n"
        + err_json
        + "\nPlease fix the code and show the complete corrected function in a fenced code block."
    )


def _no_code_turn() -> str:
    return (
        "Your response did not contain a fenced code block. Please reply with the complete "
        "reward function inside a ```python fenced block."
    )


def build_generation_prompt(
    schema: EnvironmentSchema,
    instruction: str,
    mode: str,
    library: list[SkillEntry] | None = None,
    k: int = 1,
    exclude_task: str | None = None,
    temperature: float = DEFAULT_TEMPERATURE,
    metadata: dict | None = None,
) -> PromptBundle:
    abstraction = abstraction_for_prompt(schema)
    meta = {"env_id": schema.env_id}
    meta.update(metadata or {})
    if mode == "zero_shot":
        return build_zero_shot_prompt(abstraction, instruction, schema.knowledge_notes,
                                      metadata=meta, temperature=temperature)
    if mode == "few_shot":
        entries = retrieve(library or [], instruction, k=k, exclude_task=exclude_task)
        return build_few_shot_prompt(abstraction, instruction, entries, schema.knowledge_notes,
                                     metadata=meta, temperature=temperature)
    raise ValueError(f"unknown generation mode '{mode}'")


def verify_source(source: str, schema: EnvironmentSchema) -> TypedProgram:
    return typecheck(parse(source), schema, source)


def refine_from_prompt(
    prompt: PromptBundle,
    schema: EnvironmentSchema,
    transport,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> VerifiedReward:
    """Run the query/verify/refine loop starting from an already-built prompt."""
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    transcript: list[TranscriptTurn] = []
    if prompt.system_text:
        transcript.append(TranscriptTurn("system", prompt.system_text))
    transcript.append(TranscriptTurn("user", prompt.user_text))
    errors: list[RdslError] = []

    for round_idx in range(1, max_rounds + 1):
        messages = [{"role": t.role, "content": t.content} for t in transcript]
        response = transport.complete(messages, prompt.temperature)
        transcript.append(TranscriptTurn("assistant", response))
        try:
            source = extract_code(response)
        except NoCodeBlock:
            transcript.append(TranscriptTurn("user", _no_code_turn()))
            continue
        try:
            typed = verify_source(source, schema)
        except RdslError as err:
            errors.append(err)
            transcript.append(TranscriptTurn("user", _refinement_turn(err.report_json())))
            continue
        return VerifiedReward(program=typed, rounds_used=round_idx,
                              transcript=transcript, error_history=errors)
    raise RefinementExhausted(transcript, errors)


def generate_verified_reward(
    schema: EnvironmentSchema,
    instruction: str,
    mode: str,
    transport,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    library: list[SkillEntry] | None = None,
    k: int = 1,
    exclude_task: str | None = None,
    temperature: float = DEFAULT_TEMPERATURE,
) -> VerifiedReward:
    """Generate a reward program for the instruction and refine until it
    parses and typechecks; never returns an unverified program."""
    prompt = build_generation_prompt(
        schema, instruction, mode, library=library, k=k,
        exclude_task=exclude_task, temperature=temperature,
    )
    return refine_from_prompt(prompt, schema, transport, max_rounds=max_rounds)
