"""Instruction-to-reward generation: prompts, retrieval, transports, and the
execution-error refinement loop."""

from .embed import EmbedderUnavailable, HashingEmbedder, HttpEmbedder, embed
from .generate import (
    NoCodeBlock,
    RefinementExhausted,
    TranscriptTurn,
    VerifiedReward,
    build_generation_prompt,
    extract_code,
    generate_verified_reward,
    refine_from_prompt,
    verify_source,
)
from .library import EmptyLibrary, SkillEntry, SkillLibrary, fixture_library, load_library, retrieve, save_library
from .prompts import (
    PromptBundle,
    abstraction_for_prompt,
    build_feedback_prompt,
    build_few_shot_block,
    build_few_shot_prompt,
    build_zero_shot_prompt,
)
from .transport import (
    LiveTransport,
    RecordingTransport,
    ReplayTransport,
    ScriptedTransport,
    TransportError,
    make_transport,
    request_hash,
)

__all__ = [
    "embed",
    "HashingEmbedder",
    "HttpEmbedder",
    "EmbedderUnavailable",
    "SkillEntry",
    "SkillLibrary",
    "EmptyLibrary",
    "fixture_library",
    "load_library",
    "save_library",
    "retrieve",
    "PromptBundle",
    "build_zero_shot_prompt",
    "build_few_shot_block",
    "build_few_shot_prompt",
    "build_feedback_prompt",
    "abstraction_for_prompt",
    "extract_code",
    "NoCodeBlock",
    "VerifiedReward",
    "TranscriptTurn",
    "RefinementExhausted",
    "generate_verified_reward",
    "refine_from_prompt",
    "build_generation_prompt",
    "verify_source",
    "LiveTransport",
    "ReplayTransport",
    "ScriptedTransport",
    "RecordingTransport",
    "TransportError",
    "make_transport",
    "request_hash",
]
