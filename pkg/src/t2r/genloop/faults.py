"""Deterministic fault-injection corpus for the refinement-loop regression.

Builds a 100-program corpus over the shipped environments with a configurable
number of seeded faults per generation-error bucket (default 6 misuse /
3 hallucination / 3 syntax-shape / 1 wrong-function, the zero-shot error
proportions). Each faulty program carries its intended bucket and its fixed
source, so a scripted fixer transport can play the repaired round.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..envlab import env_schema
from ..envlab.rewards import fixture_env_id, fixture_source, list_fixtures
from ..rdsl.errors import HALLUCINATION, MISUSE, SYNTAX_SHAPE, WRONG_PACKAGE
from ..rdsl.randprog import ProgramGenerator
from .transport import ScriptedTransport

# probe statements per bucket; inserted as the first body statement
_FAULT_PROBES = {
    MISUSE: [
        "probe = cubeA.gripper_openness",      # gripper_openness lives on robot
        "probe = robot.velocity",              # velocity lives on rigid objects
        "probe = norm(cubeA.qvel)",            # qvel lives on robot
        "probe = cubeB.qpos",                  # qpos lives on robot
        "probe = cabinet.qpos",                # qpos lives on handle/robot, not cabinet
        "probe = norm(robot.pose.p)",          # pose lives on objects, robot has ee_pose
    ],
    HALLUCINATION: [
        "probe = cubeA.mass_center",
        "probe = robot.elbow",
        "probe = faucet.handle.qpos",          # no faucet anywhere in these schemas
    ],
    SYNTAX_SHAPE: [
        "probe = (norm(robot.ee_pose.p - cubeA.pose.p)",   # unbalanced parenthesis
        "probe = cubeA.pose.p + cubeA.pose.q",             # vec3 vs quat
        "probe = norm(robot.gripper_openness)",            # scalar into a vector builtin
    ],
    WRONG_PACKAGE: [
        "probe = cosine_sim(cubeA.pose.p, robot.ee_pose.p)",
    ],
}

# cube-flavored probes only make sense against cube schemas
_PROBE_ENV = {
    MISUSE: ["liftcube_lite", "liftcube_lite", "liftcube_lite", "stackcube_lite",
             "opendrawer_lite", "liftcube_lite"],
    HALLUCINATION: ["liftcube_lite", "pickcube_lite", "liftcube_lite"],
    SYNTAX_SHAPE: ["pickcube_lite", "liftcube_lite", "stackcube_lite"],
    WRONG_PACKAGE: ["pickcube_lite"],
}


@dataclass(frozen=True)
class CorpusProgram:
    index: int
    env_id: str
    source: str
    category: str | None       # intended error bucket, None for clean programs
    fixed_source: str          # == source for clean programs


def _inject(source: str, probe: str) -> str:
    lines = source.splitlines()
    # after the def line, at body indentation
    return "\n".join([lines[0], f"    {probe}"] + lines[1:]) + "\n"


def build_fault_corpus(
    n: int = 100,
    seeded: tuple[int, int, int, int] = (6, 3, 3, 1),
    seed: int = 20240901,
) -> list[CorpusProgram]:
    """n programs, deterministic in `seed`; `seeded` gives the number of
    misuse/hallucination/syntax-shape/wrong-function faults in that order."""
    n_misuse, n_halluc, n_syntax, n_wrong = seeded
    total_faults = n_misuse + n_halluc + n_syntax + n_wrong
    if total_faults > n:
        raise ValueError("more faults than programs")

    rng = np.random.default_rng(seed)

    # clean base pool: every portable fixture, then generated programs
    bases: list[tuple[str, str]] = []
    for name in list_fixtures():
        bases.append((fixture_env_id(name), fixture_source(name)))
    gens = {
        env: ProgramGenerator(env_schema(env), np.random.default_rng(seed + i))
        for i, env in enumerate(["liftcube_lite", "pickcube_lite", "stackcube_lite", "opendrawer_lite"])
    }
    gen_envs = sorted(gens)
    while len(bases) < n:
        env = gen_envs[len(bases) % len(gen_envs)]
        bases.append((env, gens[env].generate()))
    bases = bases[:n]

    fault_plan: list[tuple[str, str, str]] = []  # (category, env_id, probe)
    for category, count in zip((MISUSE, HALLUCINATION, SYNTAX_SHAPE, WRONG_PACKAGE),
                               (n_misuse, n_halluc, n_syntax, n_wrong)):
        probes = _FAULT_PROBES[category]
        envs = _PROBE_ENV[category]
        for j in range(count):
            fault_plan.append((category, envs[j % len(envs)], probes[j % len(probes)]))

    fault_indices = sorted(rng.choice(n, size=total_faults, replace=False).tolist())
    plan_by_index = dict(zip(fault_indices, fault_plan))

    corpus: list[CorpusProgram] = []
    for idx in range(n):
        env_id, clean = bases[idx]
        if idx in plan_by_index:
            category, probe_env, probe = plan_by_index[idx]
            # the probe dictates which schema the program must run against;
            # pick a clean base for that env
            base_env, base_src = next(
                (e, s) for e, s in bases if e == probe_env
            )
            corpus.append(
                CorpusProgram(idx, probe_env, _inject(base_src, probe), category, base_src)
            )
        else:
            corpus.append(CorpusProgram(idx, env_id, clean, None, clean))
    return corpus


def fixer_transport(program: CorpusProgram) -> ScriptedTransport:
    """Scripted transport that first emits the (possibly faulty) program and,
    when asked again, the repaired source."""
    responses = [f"Here is the reward function.\n```python\n{program.source}```\n"]
    if program.category is not None:
        responses.append(
            f"Apologies, corrected version below.\n```python\n{program.fixed_source}```\n"
        )
    return ScriptedTransport(responses)
