from pathlib import Path

import pytest

from t2r import envlab
from t2r.genloop import (
    PromptBundle,
    abstraction_for_prompt,
    build_feedback_prompt,
    build_few_shot_block,
    build_few_shot_prompt,
    build_zero_shot_prompt,
    fixture_library,
)

GOLDEN = Path(__file__).parent / "golden"
INSTRUCTION = "Pick up cube A and lift it up by 0.2 meters."


def test_zero_shot_matches_golden(lift_schema):
    bundle = build_zero_shot_prompt(
        abstraction_for_prompt(lift_schema), INSTRUCTION, lift_schema.knowledge_notes
    )
    golden = (GOLDEN / "zero_shot_liftcube.txt").read_text(encoding="utf-8")
    assert bundle.user_text == golden  # byte-identical


def test_zero_shot_contains_instruction_and_decomposition(lift_schema):
    bundle = build_zero_shot_prompt(
        abstraction_for_prompt(lift_schema), INSTRUCTION, lift_schema.knowledge_notes
    )
    text = bundle.user_text
    assert f"I want you to fulfill the following task: {INSTRUCTION}" in text
    assert "distance between robot's gripper and our target object" in text
    assert "1. please think step by step" in text
    assert "2. then write a function" in text
    assert "3. When write code" in text
    assert bundle.temperature == 0.7


def test_zero_shot_empty_knowledge(lift_schema):
    bundle = build_zero_shot_prompt(abstraction_for_prompt(lift_schema), INSTRUCTION, ())
    # the knowledge block renders empty, leaving just the heading
    assert "Additional knowledge:\n\n\nI want you to fulfill" in bundle.user_text


def test_zero_shot_deterministic(lift_schema):
    a = build_zero_shot_prompt(abstraction_for_prompt(lift_schema), INSTRUCTION,
                               lift_schema.knowledge_notes)
    b = build_zero_shot_prompt(abstraction_for_prompt(lift_schema), INSTRUCTION,
                               lift_schema.knowledge_notes)
    assert a.user_text == b.user_text


def test_few_shot_block_matches_golden():
    lib = fixture_library()
    pick = next(e for e in lib if e.task_id == "pickcube")
    block = build_few_shot_block([pick])
    golden = (GOLDEN / "few_shot_block_pickcube.txt").read_text(encoding="utf-8")
    assert block == golden


def test_few_shot_block_order_preserved():
    lib = {e.task_id: e for e in fixture_library()}
    two = build_few_shot_block([lib["pickcube"], lib["stackcube"]])
    assert two.index(lib["pickcube"].instruction) < two.index(lib["stackcube"].instruction)
    one = build_few_shot_block([lib["pickcube"]])
    assert one.count("An example:") == 1


def test_few_shot_block_needs_entries():
    with pytest.raises(ValueError):
        build_few_shot_block([])


def test_few_shot_prompt_inserts_examples_before_task(lift_schema):
    lib = fixture_library()
    bundle = build_few_shot_prompt(
        abstraction_for_prompt(lift_schema), INSTRUCTION, lib[:1], lift_schema.knowledge_notes
    )
    text = bundle.user_text
    assert text.index("An example:") < text.index("I want you to fulfill the following task:")


def test_feedback_matches_golden():
    prev = envlab.fixture_source("stackcube_iter0")
    bundle = build_feedback_prompt(
        prev,
        "Now the robot only picks up cube A, stacks it onto cube B, but does not release cube A afterwards.",
        "The robot should release cube A after stacking it onto cube B.",
    )
    golden = (GOLDEN / "feedback_stackcube.txt").read_text(encoding="utf-8")
    assert bundle.user_text == golden


def test_feedback_slots_and_determinism():
    bundle = build_feedback_prompt("def compute_dense_reward(action):\n    return 1.0\n",
                                   "it did a thing", "do the other thing")
    text = bundle.user_text
    assert "the feedback for improvement is:\ndo the other thing" in text
    assert "After training, I can see from the robot that:\nit did a thing" in text
    again = build_feedback_prompt("def compute_dense_reward(action):\n    return 1.0\n",
                                  "it did a thing", "do the other thing")
    assert text == again.user_text


def test_feedback_requires_source():
    with pytest.raises(ValueError):
        build_feedback_prompt("   ", "d", "f")


def test_temperature_bounds():
    with pytest.raises(ValueError):
        PromptBundle(system_text="", user_text="x", temperature=2.5)
