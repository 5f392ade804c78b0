import numpy as np
import pytest

from tenfold import indices as ix
from tenfold import symmetry as sym
from tenfold.linalg import StructureError
from tenfold.models import kitaev_chain, random_in_class, ssh_chain


def unit_loop(fun, count=64):
    ks = -0.5 + np.arange(count) / count
    return np.array([np.atleast_2d(fun(k)) for k in ks])


def test_winding_examples():
    assert ix.winding(unit_loop(lambda k: np.exp(2j * np.pi * k))) == 1
    assert ix.winding(unit_loop(lambda k: 1.0 + 0j)) == 0
    assert ix.winding(unit_loop(lambda k: np.exp(-4j * np.pi * k))) == -2


def test_winding_rebase_invariance():
    loop = unit_loop(lambda k: np.exp(2j * np.pi * k) * np.exp(0.3j * np.sin(2 * np.pi * k)))
    w = ix.winding(loop)
    for shift in (1, 7, 31):
        assert ix.winding(np.roll(loop, shift, axis=0)) == w


def test_winding_errors():
    with pytest.raises(ix.GridTooCoarseError):
        ix.winding(unit_loop(lambda k: np.exp(2j * np.pi * 40 * k), count=16))
    with pytest.raises(StructureError):
        ix.winding(np.array([[[2.0 + 0j]]]))


def test_semi_winding():
    ks = np.linspace(0.0, 0.5, 33)
    qs = np.array([np.diag([np.exp(2j * np.pi * k), 1.0]) for k in ks])
    assert ix.semi_winding(qs) == 1
    const = np.array([np.eye(2, dtype=complex)] * 33)
    assert ix.semi_winding(const) == 0
    with pytest.raises(StructureError):
        bad = np.array([np.diag([np.exp(1j * np.pi / 3), 1.0])] * 33)
        ix.semi_winding(bad)


def _diii_blocks(zfun, count=64):
    ks = np.linspace(0.0, 0.5, count + 1)
    out = []
    for k in ks:
        out.append(np.array([[0.0, zfun(k)], [-zfun(-k), 0.0]], dtype=complex))
    return np.array(out)


def test_diii_sign_index():
    # constant A: both quotient factors coincide, product +1
    assert ix.diii_sign_index(_diii_blocks(lambda k: 1.0)) == 1
    # z(k) = e^{2 pi i k}: det A is constant 1 while the Pfaffian flips
    # sign between the fixed points, hence index -1 (hand-derived)
    assert ix.diii_sign_index(_diii_blocks(lambda k: np.exp(2j * np.pi * k))) == -1
    # winding z by 2 restores matching Pfaffians
    assert ix.diii_sign_index(_diii_blocks(lambda k: np.exp(4j * np.pi * k))) == 1


def test_phase_track_lift():
    vals = np.exp(1j * np.linspace(0.0, 3.0, 40))
    track = ix.track_phases(vals)
    assert np.allclose(np.exp(1j * track.alpha), vals)
    assert track.max_step < np.pi / 2


def test_index_trivial_classes():
    for label, n, N in (("A", 1, 3), ("AI", 2, 5), ("AII", 2, 4), ("C", 2, 4), ("CI", 2, 4)):
        for d in (0, 1):
            fam, ops = random_in_class(label, n, N, seed=1, d=d, grid_g=10)
            idx = ix.index(fam, ops, label)
            assert idx.trivial and idx.value is None


def test_index_kitaev():
    # strong index -1 exactly in the topological window |mu| < 2|t|
    for mu, strong in ((1.0, -1), (3.0, 1), (-1.5, -1), (-3.5, 1)):
        fam, ops, cls = kitaev_chain(mu=mu, g=32)
        idx = ix.index(fam, ops, cls)
        assert idx.strong == strong
        assert idx.weak in (-1, 1)
        assert idx.value == (idx.weak, idx.weak * idx.strong)
        assert idx.strong == idx.value[0] * idx.value[1]


def test_index_ssh():
    fam, ops, cls = ssh_chain(1.0, 2.0, g=48)
    idx = ix.index(fam, ops, cls)
    assert idx.value == -1  # this library's orientation convention
    fam, ops, cls = ssh_chain(1.0, 0.5, g=32)
    assert ix.index(fam, ops, cls).value == 0


def test_index_bdi_consistency():
    fam, ops = random_in_class("BDI", 2, 4, seed=3, d=1, grid_g=12, index_target=(-1, 1))
    idx = ix.index(fam, ops, "BDI")
    det0, w = idx.value
    assert (det0, w) == (-1, 1)
    assert idx.weak == det0
    # det Q(1/2) = det Q(0) (-1)^W is asserted inside the dispatcher
    assert idx.strong == det0 * (-1) ** w


def test_index_requires_validation():
    fam, ops = random_in_class("D", 2, 4, seed=4, d=1, grid_g=10)
    bad_ops = sym.SymmetryOps(N=4, c_mat=np.eye(4, dtype=complex), eps_c=1)
    with pytest.raises(StructureError):
        ix.index(fam, bad_ops, "D")


def test_index_group_membership():
    # the value lands in the Table-1 group for every class and dimension
    sizes = {"A": (1, 3), "AIII": (2, 4), "AI": (2, 5), "BDI": (2, 4), "D": (2, 4),
             "DIII": (2, 4), "AII": (2, 6), "CII": (2, 4), "C": (2, 4), "CI": (2, 4)}
    for label, (n, N) in sizes.items():
        cls = sym.get_class(label)
        for d in (0, 1):
            fam, ops = random_in_class(label, n, N, seed=7, d=d, grid_g=10)
            idx = ix.index(fam, ops, cls, validated=True)
            group = cls.index_group(d)
            if group == "0":
                assert idx.value is None
            elif group == "Z":
                assert isinstance(idx.value, int)
            elif group == "Z2":
                assert idx.value in (-1, 1)
            elif group == "Z2xZ2":
                assert idx.value[0] in (-1, 1) and idx.value[1] in (-1, 1)
                assert idx.strong == idx.value[0] * idx.value[1]
            elif group == "Z2xZ":
                assert idx.value[0] in (-1, 1) and isinstance(idx.value[1], int)


def test_grid_refinement_stability_small():
    for maker in (lambda g: kitaev_chain(mu=1.0, g=g),
                  lambda g: kitaev_chain(mu=3.0, g=g),
                  lambda g: ssh_chain(1.0, 2.0, g=g)):
        vals = []
        for g in (48, 64, 128):
            fam, ops, cls = maker(g)
            vals.append(ix.index(fam, ops, cls).value)
        assert vals[0] == vals[1] == vals[2]
