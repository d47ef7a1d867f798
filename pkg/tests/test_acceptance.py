"""Acceptance gate: one test group per criterion, at the stated tolerances and time limits.

The terminal summary prints one PASS/FAIL line per criterion.
"""

import json
import time

import numpy as np
import pytest

import oracles
from conftest import natural_rep
from rfiteleport.cli import main
from rfiteleport.groups import (
    all_subgroups,
    coset_space,
    cyclic_group,
    dihedral_group,
    quaternion_group,
    symmetric_group,
)
from rfiteleport.linalg import is_unitary, projector, purity
from rfiteleport.reps import (
    basic_permutation_characters,
    character,
    decompose_into_basics,
    end_character,
    permutation_character,
    permutation_representation,
)
from rfiteleport.sim import FrameConfig, ProtocolSpec, random_pure_state, sweep, teleport
from rfiteleport.ueb import (
    Z2_ELEMENTS,
    Z2_PI_A,
    builtin_z2_example,
    construct_gueb_dim_le4,
    hadamard_ueb,
    two_parameter_unitary,
    verify_equivariance,
    verify_ueb,
)

C1 = "golden Z2 basis is a UEB with sigma_a = (0 1)(2 3)"
C2 = "unspeakable Z2 demo is perfect on all frame pairs"
C3 = "speakable Z2 demo fails under misalignment"
C4 = "S3 irrep is IMPOSSIBLE with the exact subgroup table"
C5 = "natural Z2, S3, S4 actions constructed and perfect"
C6 = "two-parameter unitaries over the whole |a| interval"
C7 = "commuting-Hadamard UEBs are S_n-equivariant"
C8 = "oracle equivalences for subgroups and characters"


class Timer:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.2f}s, limit {self.limit}s"


@pytest.fixture(scope="module")
def z2_demo(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo")
    assert main(["demo", "z2", "--out", str(out)]) == 0
    return out


@pytest.mark.criterion(1, C1)
def test_golden_example():
    with Timer(1.0):
        rep, gueb = builtin_z2_example()
        report = verify_ueb(Z2_ELEMENTS)
        assert report.unitarity_defect <= 1e-9 and report.orthogonality_defect <= 1e-9
        sigma = verify_equivariance(Z2_ELEMENTS, rep, tol=1e-9)
        assert sigma.tolist() == [[0, 1, 2, 3], [1, 0, 3, 2]]
        P = Z2_PI_A
        for i, j in [(1, 0), (3, 2), (0, 1), (2, 3)]:
            assert np.abs(P.conj().T @ Z2_ELEMENTS[i] @ P - Z2_ELEMENTS[j]).max() <= 1e-9


@pytest.mark.criterion(2, C2)
def test_unspeakable_demo(z2_demo, tmp_path):
    with Timer(1.0):
        code = main(["simulate", str(z2_demo / "rep.json"), str(z2_demo / "bundle.json"),
                     "--procedure", "unspeakable", "--trials", "8", "--out", str(tmp_path)])
        assert code == 0
        report = json.loads((tmp_path / "simulate_unspeakable.json").read_text())
        assert np.array(report["grid_min"]).shape == (2, 2)
        assert report["trials"] == 8
        assert report["global_min"] >= 1 - 1e-8
        assert report["max_deviation"] <= 1e-8


def _misaligned_outputs():
    rep, gueb = builtin_z2_example()
    spec = ProtocolSpec(rep, gueb.elements, "speakable")
    for seed in range(8):
        psi = random_pure_state(2, seed)
        for frames in (FrameConfig(0, 1), FrameConfig(1, 0)):
            yield rep, gueb, psi, frames, teleport(spec, frames, projector(psi))


@pytest.mark.criterion(3, C3)
def test_speakable_fidelity(z2_demo, tmp_path):
    with Timer(1.0):
        code = main(["simulate", str(z2_demo / "rep.json"), str(z2_demo / "bundle.json"),
                     "--procedure", "speakable", "--out", str(tmp_path)])
        assert code == 0
        grid = np.array(json.loads((tmp_path / "simulate_speakable.json").read_text())["grid_min"])
        assert grid[0, 1] < 0.99 and grid[1, 0] < 0.99


@pytest.mark.criterion(3, C3)
def test_speakable_matches_brute_force_oracle():
    with Timer(1.0):
        for rep, gueb, psi, frames, out in _misaligned_outputs():
            ref = oracles.brute_force_teleport(
                projector(psi), list(gueb.elements), rep[frames.g_A], rep[frames.g_B], "speakable"
            )
            assert np.abs(out - ref).max() <= 1e-9


@pytest.mark.criterion(3, C3)
def test_speakable_output_is_mixed():
    with Timer(1.0):
        purities = [purity(out) for *_, out in _misaligned_outputs()]
        assert max(purities) < 0.99, f"output purities {min(purities):.12f}..{max(purities):.12f}"


@pytest.mark.criterion(4, C4)
def test_s3_impossible(tmp_path, capsys):
    with Timer(1.0):
        c, s = -0.5, np.sqrt(3) / 2
        irrep = tmp_path / "irrep.json"
        irrep.write_text(json.dumps({
            "group": {"degree": 3, "generators": [[1, 0, 2], [1, 2, 0]], "name": "S3"},
            "generator_matrices": [[[1, 0], [0, -1]], [[c, -s], [s, c]]],
        }))
        assert main(["analyze", str(irrep), "--out", str(tmp_path)]) == 0
        analysis = json.loads((tmp_path / "analysis.json").read_text())
        assert analysis["verdict"] == "IMPOSSIBLE"
        assert analysis["end_character"] == [4, 0, 1]
        capsys.readouterr()

        group = tmp_path / "s3.json"
        group.write_text(json.dumps({"degree": 3, "generators": [[1, 0, 2], [1, 2, 0]]}))
        assert main(["subgroups", str(group), "--json"]) == 0
        table = json.loads(capsys.readouterr().out)
        assert [r["character"] for r in table["rows"]] == [[6, 0, 0], [3, 1, 0], [2, 0, 2], [1, 1, 1]]
        assert [r["order"] for r in table["rows"]] == [1, 2, 3, 6]

        S3 = symmetric_group(3)
        cert = decompose_into_basics((4, 0, 1), basic_permutation_characters(S3))
        assert not cert.feasible
        # exhaustive: every coefficient vector within the bounds was ruled out
        rows = np.array([chi.as_integers() for _, chi in basic_permutation_characters(S3)])
        for coeffs in np.ndindex(*(b + 1 for b in cert.bounds)):
            assert tuple(np.array(coeffs) @ rows) != (4, 0, 1)


@pytest.mark.criterion(5, C5)
def test_natural_actions_constructed():
    with Timer(120.0):
        for G, pairs in ((cyclic_group(2), 4), (symmetric_group(3), 36), (symmetric_group(4), 576)):
            rep = natural_rep(G)
            gueb = construct_gueb_dim_le4(rep)
            assert verify_ueb(gueb.elements).valid
            report = sweep(ProtocolSpec(rep, gueb.elements, "unspeakable"), trials=8, seed=7)
            assert report.grid.size == pairs
            assert report.global_min >= 1 - 1e-8


@pytest.mark.criterion(6, C6)
def test_two_parameter_interval():
    with Timer(5.0):
        rng = np.random.default_rng(2024)
        for n in (2, 3, 4):
            lower = (n - 2) / n
            for abs_a in rng.uniform(lower, 1, size=100):
                phase = rng.uniform(0, 2 * np.pi)
                for sign in (1, -1):
                    T = two_parameter_unitary(n, abs_a, phase, sign)
                    assert is_unitary(T.matrix, 1e-9)[0]
            for bad in (lower - 0.05, 1.05, 1.0):
                with pytest.raises(ValueError):
                    two_parameter_unitary(n, bad)
            if n >= 3:
                T = two_parameter_unitary(n, lower, rng.uniform(0, 2 * np.pi))
                alpha, beta = T.a / abs(T.a), T.b / abs(T.b)
                assert abs(beta + alpha) <= 1e-9


@pytest.mark.criterion(7, C7)
def test_commuting_hadamards():
    with Timer(30.0):
        rng = np.random.default_rng(77)
        reps = {n: natural_rep(symmetric_group(n)) for n in (2, 3, 4)}
        for _ in range(50):
            n = int(rng.choice([2, 3, 4]))
            T = two_parameter_unitary(n, 1 / np.sqrt(n), rng.uniform(0, 2 * np.pi), int(rng.choice([1, -1])))
            basis, _ = hadamard_ueb(T.matrix)
            assert verify_ueb(basis).valid
            assert verify_equivariance(basis.elements, reps[n]) is not None


ORACLE_GROUPS = [(f"Z{n}", lambda n=n: cyclic_group(n)) for n in range(1, 25)] + [
    ("S3", lambda: symmetric_group(3)),
    ("S4", lambda: symmetric_group(4)),
    ("D8", lambda: dihedral_group(4)),
    ("Q8", quaternion_group),
]


@pytest.mark.criterion(8, C8)
def test_oracle_equivalences():
    with Timer(60.0):
        for name, make in ORACLE_GROUPS:
            G = make()
            subs = all_subgroups(G)
            ours = {frozenset(G.elements[i] for i in H) for H in subs}
            assert ours == oracles.subgroups_by_extension(G.elements), name
            for H in subs:
                X = coset_space(G, sorted(H))
                by_trace = character(permutation_representation(X)).values
                by_count = permutation_character(X).values
                assert np.array_equal(by_trace, by_count), name
                for k, cls in enumerate(G.conjugacy_classes()):
                    g = cls[0]
                    fixed = sum(1 for x in range(X.size) if X.action[g][x] == x)
                    assert by_count[k] == fixed
