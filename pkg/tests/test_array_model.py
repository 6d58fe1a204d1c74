import numpy as np
import pytest

from hankeldoa.array_model import (
    SamplingMask,
    Snapshot,
    SourceScene,
    angle_degrees_to_tau,
    load_scene,
    parse_indices,
    project,
    read_snapshot_csv,
    save_scene,
    synthesize_snapshot,
    tau_to_angle_degrees,
    write_snapshot_csv,
)
from hankeldoa.exceptions import DimensionError, InvalidSceneError, OutOfRangeError

from conftest import random_complex


def loop_oracle(taus, amps, n):
    out = []
    for k in range(1, n + 1):
        acc = 0j
        for tau, b in zip(taus, amps):
            acc += b * complex(np.cos(-2 * np.pi * tau * k), np.sin(-2 * np.pi * tau * k))
        out.append(acc)
    return np.array(out)


def test_zero_frequency_is_constant():
    y = synthesize_snapshot(SourceScene((0.0,), (1,)), 4)
    np.testing.assert_array_equal(y.values, [1, 1, 1, 1])
    assert y.mask is None


def test_quarter_frequency():
    y = synthesize_snapshot(SourceScene((0.25,), (1,)), 4)
    np.testing.assert_allclose(y.values, [-1j, -1, 1j, 1], atol=1e-15)


def test_two_sources_against_loop():
    taus, amps = (0.1, 0.3), (1, 2)
    y = synthesize_snapshot(SourceScene(taus, amps), 8)
    np.testing.assert_allclose(y.values, loop_oracle(taus, amps, 8), atol=1e-14, rtol=0)


def test_linearity_and_triangle_bound(rng):
    a = SourceScene((0.11, -0.27), tuple(random_complex(rng, 2)))
    b = SourceScene((0.31, 0.02, -0.45), tuple(random_complex(rng, 3)))
    n = 40
    ya = synthesize_snapshot(a, n).values
    yb = synthesize_snapshot(b, n).values
    yab = synthesize_snapshot(a.union(b), n).values
    np.testing.assert_allclose(ya + yb, yab, atol=1e-13, rtol=0)
    bound = sum(abs(x) for x in a.union(b).amplitudes)
    assert np.all(np.abs(yab) <= bound + 1e-12)


def test_noise_is_seeded():
    sc = SourceScene((0.1,), (1,))
    y1 = synthesize_snapshot(sc, 16, seed=3, noise_std=0.1).values
    y2 = synthesize_snapshot(sc, 16, seed=3, noise_std=0.1).values
    y3 = synthesize_snapshot(sc, 16, seed=4, noise_std=0.1).values
    np.testing.assert_array_equal(y1, y2)
    assert not np.array_equal(y1, y3)
    clean = synthesize_snapshot(sc, 16).values
    assert 0 < np.linalg.norm(y1 - clean) < 1.0


@pytest.mark.parametrize(
    "taus,amps",
    [((0.1, 0.1), (1, 1)), ((), ()), ((0.1,), (0,)), ((0.1, 0.2), (1,))],
)
def test_invalid_scenes(taus, amps):
    with pytest.raises(InvalidSceneError):
        SourceScene(taus, amps)


def test_snapshot_validation():
    with pytest.raises(DimensionError):
        synthesize_snapshot(SourceScene((0.1,), (1,)), 2)
    with pytest.raises(DimensionError):
        Snapshot(np.array([1, 2, 3]), SamplingMask(3, (1,)))


def test_project_examples():
    y = Snapshot(np.array([1, 2, 3, 4]))
    p = project(y, SamplingMask(4, (1, 3)))
    np.testing.assert_array_equal(p.values, [1, 0, 3, 0])
    assert p.mask.omega == (1, 3)
    np.testing.assert_array_equal(project(y, SamplingMask.full(4)).values, y.values)
    np.testing.assert_array_equal(
        project(Snapshot(np.array([5, 6, 7])), SamplingMask(3, (2,))).values, [0, 6, 0]
    )


def test_project_idempotent_and_size_check(rng):
    y = Snapshot(random_complex(rng, 10))
    mask = SamplingMask(10, (2, 3, 7, 10))
    once = project(y, mask)
    twice = project(once, mask)
    np.testing.assert_array_equal(once.values, twice.values)
    assert once.mask == twice.mask
    with pytest.raises(DimensionError):
        project(y, SamplingMask(9, (1,)))


def test_mask_invariants():
    with pytest.raises(DimensionError):
        SamplingMask(5, ())
    with pytest.raises(DimensionError):
        SamplingMask(5, (1, 1))
    with pytest.raises(DimensionError):
        SamplingMask(5, (0, 2))
    with pytest.raises(DimensionError):
        SamplingMask(5, (6,))
    with pytest.raises(DimensionError):
        SamplingMask(3, (1,), probabilities=np.array([0.1, 1.2, 0.0]))
    m = SamplingMask(5, (4, 2))
    assert m.omega == (2, 4)
    np.testing.assert_array_equal(m.boolean, [False, True, False, True, False])


def test_angle_conversion():
    assert tau_to_angle_degrees(0.0, 0.5) == 0.0
    assert tau_to_angle_degrees(0.5, 0.5) == pytest.approx(90.0)
    assert tau_to_angle_degrees(0.25, 0.5) == pytest.approx(30.0, abs=1e-12)
    with pytest.raises(OutOfRangeError):
        tau_to_angle_degrees(0.6, 0.5)
    assert angle_degrees_to_tau(30.0) == pytest.approx(0.25)


def test_scene_and_snapshot_files(tmp_path, rng):
    scene = SourceScene((0.1, -0.2), (1 + 2j, -0.5), wavelength_ratio=0.5)
    save_scene(scene, tmp_path / "scene.json")
    assert load_scene(tmp_path / "scene.json") == scene

    y = synthesize_snapshot(scene, 9)
    write_snapshot_csv(y, tmp_path / "full.csv")
    back = read_snapshot_csv(tmp_path / "full.csv")
    np.testing.assert_array_equal(back.values, y.values)
    assert back.mask is None

    part = project(y, SamplingMask(9, (1, 4, 9)))
    write_snapshot_csv(part, tmp_path / "part.csv")
    lines = (tmp_path / "part.csv").read_text().splitlines()
    assert lines[0] == "index,re,im" and len(lines) == 4
    back = read_snapshot_csv(tmp_path / "part.csv", n=9)
    assert back.mask.omega == (1, 4, 9)
    np.testing.assert_array_equal(back.values, part.values)


def test_parse_indices():
    assert parse_indices(["1,3,5-7"]) == (1, 3, 5, 6, 7)
    assert parse_indices([2, "4"]) == (2, 4)
