import numpy as np
import pytest

from t2r.genloop import EmptyLibrary, SkillEntry, SkillLibrary, embed, fixture_library, retrieve

LIFT_INSTRUCTION = "Pick up cube A and lift it up by 0.2 meters."


def test_embed_deterministic_and_unit_norm():
    a = embed("push the chair to the marked position")
    b = embed("push the chair to the marked position")
    assert np.array_equal(a, b)
    assert abs(np.linalg.norm(a) - 1.0) < 1e-12
    assert a.shape == (256,)


def test_embed_cosine_self_is_one():
    v = embed(LIFT_INSTRUCTION)
    assert abs(float(np.dot(v, v)) - 1.0) < 1e-12


def test_embed_rejects_empty():
    with pytest.raises(ValueError):
        embed("")


def test_fixture_library_recomputes_embeddings():
    lib = fixture_library()
    assert len(lib) == 6
    for entry in lib:
        assert abs(np.linalg.norm(entry.embedding) - 1.0) < 1e-6


def test_identical_instruction_under_other_id_ranks_first_sim_one():
    lib = fixture_library()
    twin = SkillEntry("lift_twin", LIFT_INSTRUCTION,
                      "def compute_dense_reward(action):\n    return 0.0\n",
                      embed(LIFT_INSTRUCTION))
    top = retrieve(lib + [twin], LIFT_INSTRUCTION, k=1, exclude_task="liftcube")
    assert top[0].task_id == "lift_twin"
    assert abs(float(np.dot(embed(LIFT_INSTRUCTION), top[0].embedding)) - 1.0) < 1e-12


def test_excluded_task_never_returned():
    lib = fixture_library()
    for k in range(1, 6):
        out = retrieve(lib, LIFT_INSTRUCTION, k=k, exclude_task="liftcube")
        assert all(e.task_id != "liftcube" for e in out)
        assert len(out) == k


def test_results_sorted_by_nonincreasing_similarity():
    lib = fixture_library()
    q = embed(LIFT_INSTRUCTION)
    out = retrieve(lib, LIFT_INSTRUCTION, k=5, exclude_task="liftcube")
    sims = [float(np.dot(q, e.embedding)) for e in out]
    assert sims == sorted(sims, reverse=True)


def test_top1_excluding_self_is_pickcube_brute_force():
    # brute-force cosine over all six fixture embeddings is the oracle
    lib = fixture_library()
    q = embed(LIFT_INSTRUCTION)
    brute = max((e for e in lib if e.task_id != "liftcube"),
                key=lambda e: float(np.dot(q, e.embedding)))
    assert brute.task_id == "pickcube"
    assert retrieve(lib, LIFT_INSTRUCTION, k=1, exclude_task="liftcube")[0].task_id == "pickcube"


def test_empty_after_exclusion_raises():
    lib = [e for e in fixture_library() if e.task_id == "liftcube"]
    with pytest.raises(EmptyLibrary):
        retrieve(lib, LIFT_INSTRUCTION, k=1, exclude_task="liftcube")


def test_deterministic_tie_break_ascending_task_id():
    source = "def compute_dense_reward(action):\n    return 0.0\n"
    vec = embed("identical instruction")
    entries = [SkillEntry(tid, "identical instruction", source, vec)
               for tid in ["zeta", "alpha", "mid"]]
    out = retrieve(entries, "identical instruction", k=3)
    assert [e.task_id for e in out] == ["alpha", "mid", "zeta"]


def test_k_validation():
    with pytest.raises(ValueError):
        retrieve(fixture_library(), LIFT_INSTRUCTION, k=0)


def test_mutable_library_appends_and_retrieves():
    lib = SkillLibrary(fixture_library())
    lib.add("newtask", "Wave the gripper in a circle.", "def compute_dense_reward(action):\n    return 0.0\n")
    assert len(lib.snapshot()) == 7
    top = lib.retrieve("Wave the gripper in a circle.", k=1)
    assert top[0].task_id == "newtask"
