import numpy as np
import pytest

from topopaths.errors import TooLarge
from topopaths.oracle import enumerate_classes
from topopaths.scenarios import small_scenes
from topopaths.topology import uvd_deformable

SCENES = {sc.name.removeprefix("small-"): sc for sc in small_scenes()}


def classes(name, pitch=0.5, ratio=1.5, **kw):
    sc = SCENES[name]
    p = sc.params
    env = sc.env.with_clearance(p.clearance)
    return env, enumerate_classes(env, sc.start, sc.goal, pitch, ratio, p.delta_d, plane_z=p.plane_z, **kw)


@pytest.mark.parametrize("name,count", [("empty", 1), ("disk", 2), ("two-disks", 3), ("series", 4)])
def test_class_counts(name, count):
    _, res = classes(name)
    assert res.class_count == count == len(res.class_representatives)


@pytest.mark.parametrize("name", ["disk", "two-disks"])
def test_stable_under_pitch_halving(name):
    assert classes(name, 0.5)[1].class_count == classes(name, 0.25)[1].class_count


def test_representatives_are_distinct_and_sorted():
    env, res = classes("triangle")
    reps = res.class_representatives
    assert [r.length for r in reps] == sorted(r.length for r in reps)
    for a in range(len(reps)):
        for b in range(a + 1, len(reps)):
            assert not uvd_deformable(env, reps[a], reps[b], 0.1)


def test_budget_monotone():
    counts = [classes("two-disks", ratio=r)[1].class_count for r in (1.0, 1.1, 1.2, 1.5)]
    assert counts == sorted(counts)


def test_exhaustive_matches_label_setting():
    for name in ("disk", "two-disks"):
        _, fast = classes(name, 1.0, 1.3)
        _, slow = classes(name, 1.0, 1.3, exhaustive=True)
        assert fast.class_count == slow.class_count


def test_too_large():
    with pytest.raises(TooLarge):
        classes("empty", 0.05, max_nodes=500)
