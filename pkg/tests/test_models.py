import numpy as np
import pytest

from tenfold import indices as ix
from tenfold import models as md
from tenfold import symmetry as sym
from tenfold.linalg import StructureError, max_abs


def test_kitaev_phase_diagram():
    # oracle: 2x2 closed form puts the transition at |mu| = 2|t|
    for mu in np.arange(-3.5, 3.6, 0.5):
        if abs(abs(mu) - 2.0) < 1e-9:
            continue
        fam, ops, cls = md.kitaev_chain(t=1.0, delta=1.0, mu=mu, g=48)
        idx = ix.index(fam, ops, cls)
        want = -1 if abs(mu) < 2.0 else 1
        assert idx.strong == want, mu


def test_kitaev_gap_closure():
    with pytest.raises(md.GapClosedError) as exc:
        md.kitaev_chain(t=1.0, delta=1.0, mu=2.0, g=16)
    assert abs(exc.value.k) in (0.0, 0.5)
    with pytest.raises(md.GapClosedError):
        md.kitaev_chain(t=1.0, delta=1.0, mu=-2.0, g=16)


def test_ssh_phase_diagram():
    # oracle: winding of the phase of t1 + t2 e^{-2 pi i k}
    # t2 near t1 needs a finer grid: the phase velocity of t1 + t2 e^{-2 pi i k}
    # scales like 1/|t1 - t2| near k = 1/2
    for t2, mag in ((2.0, 1), (0.5, 0), (1.5, 1), (0.9, 0)):
        fam, ops, cls = md.ssh_chain(1.0, t2, g=96)
        idx = ix.index(fam, ops, cls)
        assert abs(idx.value) == mag

        def oracle(t1, t2):
            ks = np.linspace(-0.5, 0.5, 4097)
            q = t1 + t2 * np.exp(-2j * np.pi * ks)
            return int(round(np.sum(np.angle(q[1:] / q[:-1])) / (2 * np.pi)))

        assert abs(idx.value) == abs(oracle(1.0, t2))


def test_ssh_gap_closure():
    with pytest.raises(md.GapClosedError):
        md.ssh_chain(1.0, 1.0, g=16)


def test_generate_dispatch_and_unused_params():
    spec = md.ModelSpec(name="kitaev-chain", parameters={"mu": 1.0}, grid_g=16)
    fam, ops, cls = md.generate(spec)
    assert cls.label == "D" and fam.num_k == 32
    with pytest.raises(ValueError):
        md.generate(md.ModelSpec(name="kitaev-chain", parameters={"bogus": 1}, grid_g=8))
    with pytest.raises(ValueError):
        md.generate(md.ModelSpec(name="no-such-model"))


def test_random_in_class_valid_everywhere():
    sizes = {"A": (1, 3), "AIII": (2, 4), "AI": (2, 5), "BDI": (2, 4), "D": (2, 4),
             "DIII": (2, 4), "AII": (2, 6), "CII": (2, 4), "C": (2, 4), "CI": (2, 4)}
    for label, (n, N) in sizes.items():
        for d in (0, 1):
            fam, ops = md.random_in_class(label, n, N, seed=11, d=d, grid_g=10)
            assert sym.validate_class(fam, ops, label).ok


def test_random_in_class_deterministic():
    a1, _ = md.random_in_class("D", 2, 4, seed=42, d=1, grid_g=8)
    a2, _ = md.random_in_class("D", 2, 4, seed=42, d=1, grid_g=8)
    assert max_abs(a1.samples - a2.samples) == 0.0


def test_random_in_class_rejects_bad_dims():
    with pytest.raises(StructureError):
        md.random_in_class("DIII", 3, 6, seed=0)
    with pytest.raises(StructureError):
        md.random_in_class("AIII", 2, 5, seed=0)


def test_random_in_class_index_targets():
    cases = [
        ("AIII", 1, 2, 1), ("AIII", 2, 4, -1),
        ("BDI", 2, 4, (1, -1)), ("BDI", 1, 2, (-1, 0)),
        ("D", 1, 2, (-1, 1)), ("D", 2, 4, (1, -1)),
        ("DIII", 2, 4, -1), ("DIII", 2, 4, 1),
        ("CII", 2, 4, 2), ("CII", 2, 4, 0),
    ]
    for label, n, N, target in cases:
        fam, ops = md.random_in_class(label, n, N, seed=5, d=1, grid_g=10,
                                      index_target=target)
        assert ix.index(fam, ops, label, validated=True).value == target
    fam, ops = md.random_in_class("D", 2, 4, seed=5, d=0, index_target=-1)
    assert ix.index(fam, ops, "D", validated=True).value == -1
    fam, ops = md.random_in_class("BDI", 3, 6, seed=5, d=0, index_target=-1)
    assert ix.index(fam, ops, "BDI", validated=True).value == -1


def test_random_in_class_hits_components():
    vals0 = set()
    vals1 = set()
    for seed in range(100):
        fam, ops = md.random_in_class("D", 2, 4, seed=seed, d=0)
        vals0.add(ix.index(fam, ops, "D", validated=True).value)
        fam, ops = md.random_in_class("D", 1, 2, seed=seed, d=1, grid_g=10)
        vals1.add(ix.index(fam, ops, "D", validated=True).value)
    assert vals0 == {1, -1}
    assert vals1 == {(1, 1), (1, -1), (-1, 1), (-1, -1)}


def test_random_pair_shares_ops():
    f0, f1, ops = md.random_pair_in_class("CII", 2, 4, seed=9, d=1, grid_g=10,
                                          index_targets=(2, 2))
    assert sym.validate_class(f0, ops, "CII").ok
    assert sym.validate_class(f1, ops, "CII").ok
    assert ix.index(f0, ops, "CII", validated=True).value == 2
    assert ix.index(f1, ops, "CII", validated=True).value == 2
