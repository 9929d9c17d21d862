import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import nsinpaint as ns


def dilation_oracle(omega_set, radius=2):
    """Brute-force pairwise expansion: all (i,j) within Manhattan distance
    ``radius`` of some member of omega_set."""
    out = set()
    for (k, l) in omega_set:
        for di in range(-radius, radius + 1):
            for dj in range(-radius, radius + 1):
                if abs(di) + abs(dj) <= radius:
                    out.add((k + di, l + dj))
    return out


def test_single_pixel_counts():
    img = ns.GrayImage(np.zeros((9, 9)))
    mask = np.zeros((9, 9))
    mask[4, 4] = 1
    dom = ns.extract_domain(img, mask)
    assert dom.n_omega == 1
    assert dom.n_omega_prime == 13
    assert set(map(tuple, dom.omega_prime)) == dilation_oracle({(4, 4)})


def test_empty_mask_rejected():
    img = ns.GrayImage(np.zeros((9, 9)))
    with pytest.raises(ns.EmptyMask):
        ns.extract_domain(img, np.zeros((9, 9)))


def test_shape_mismatch_rejected():
    img = ns.GrayImage(np.zeros((9, 9)))
    with pytest.raises(ns.ShapeMismatch):
        ns.extract_domain(img, np.zeros((9, 10)))


def test_block_mask_against_pairwise_oracle():
    img = ns.GrayImage(np.zeros((50, 50)))
    mask = np.zeros((50, 50))
    mask[20:30, 20:30] = 1
    dom = ns.extract_domain(img, mask)
    assert dom.n_omega == 100
    omega_set = {(i, j) for i in range(20, 30) for j in range(20, 30)}
    expected = dilation_oracle(omega_set)
    assert set(map(tuple, dom.omega_prime)) == expected
    assert dom.n_omega_prime == len(expected)


@pytest.mark.parametrize("pos", [(2, 10), (10, 2), (29, 10), (10, 29)])
def test_margin_violations_rejected(pos):
    img = ns.GrayImage(np.zeros((32, 32)))
    mask = np.zeros((32, 32))
    mask[pos] = 1
    with pytest.raises(ns.MaskTouchesBorder):
        ns.extract_domain(img, mask)


def test_margin_boundary_allowed():
    img = ns.GrayImage(np.zeros((32, 32)))
    mask = np.zeros((32, 32))
    mask[3, 3] = 1
    mask[28, 28] = 1
    dom = ns.extract_domain(img, mask)
    assert dom.n_omega == 2


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_dilation_matches_oracle_on_random_masks(data):
    rng_seed = data.draw(st.integers(0, 2**31 - 1))
    rng = np.random.default_rng(rng_seed)
    h = data.draw(st.integers(8, 32))
    w = data.draw(st.integers(8, 32))
    mask = np.zeros((h, w), dtype=bool)
    interior = rng.random((h - 6, w - 6)) < 0.15
    mask[3 : h - 3, 3 : w - 3] = interior
    if not mask.any():
        mask[h // 2, w // 2] = True
    img = ns.GrayImage(np.zeros((h, w)))
    dom = ns.extract_domain(img, mask)
    omega_set = set(zip(*np.nonzero(mask)))
    assert set(map(tuple, dom.omega)) == omega_set
    assert set(map(tuple, dom.omega_prime)) == dilation_oracle(omega_set)


def test_natural_ordering_is_column_major():
    img = ns.GrayImage(np.zeros((16, 16)))
    mask = np.zeros((16, 16))
    mask[4:8, 5:9] = 1
    dom = ns.extract_domain(img, mask)
    for coords in (dom.omega, dom.omega_prime):
        keys = [(int(j), int(i)) for i, j in coords]
        assert keys == sorted(keys)
        assert len(set(keys)) == len(keys)  # strict total order


def test_index_maps_are_bijections():
    img = ns.GrayImage(np.zeros((16, 16)))
    mask = np.zeros((16, 16))
    mask[5:9, 4:10] = 1
    dom = ns.extract_domain(img, mask)
    for coords, idx in ((dom.omega, dom.idx_omega), (dom.omega_prime, dom.idx_omega_prime)):
        assert len(idx) == len(coords)
        for p, (i, j) in enumerate(coords):
            assert idx[(int(i), int(j))] == p
    # omega positions inside omega'
    for p, (i, j) in enumerate(dom.omega):
        assert dom.idx_omega_prime[(int(i), int(j))] == dom.omega_in_prime[p]


def test_restrict_constant_image():
    img = ns.GrayImage(np.full((12, 12), 0.7))
    mask = np.zeros((12, 12))
    mask[5:7, 5:7] = 1
    dom = ns.extract_domain(img, mask)
    assert np.all(ns.restrict(img, dom, "omega") == 0.7)
    assert np.all(ns.restrict(img, dom, "omega_prime") == 0.7)


def test_restrict_ordering_matches_sorted_coordinates():
    h, w = 12, 14
    ii, jj = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    img = ns.GrayImage(ii + jj * w)
    mask = np.zeros((h, w))
    mask[4, 4] = mask[5, 4] = mask[4, 5] = 1
    dom = ns.extract_domain(img, mask)
    coords = sorted([(4, 4), (5, 4), (4, 5)], key=lambda c: (c[1], c[0]))
    expected = np.array([i + j * w for i, j in coords], dtype=float)
    assert np.array_equal(ns.restrict(img, dom, "omega"), expected)


def test_scatter_restrict_round_trips():
    rng = np.random.default_rng(3)
    img = ns.GrayImage(rng.random((16, 16)))
    mask = np.zeros((16, 16))
    mask[6:10, 5:9] = 1
    dom = ns.extract_domain(img, mask)
    u0 = ns.restrict(img, dom, "omega")
    assert np.array_equal(ns.scatter(u0, dom, img).data, img.data)
    values = rng.random(dom.n_omega)
    assert np.array_equal(ns.restrict(ns.scatter(values, dom, img), dom, "omega"), values)


def test_scatter_touches_only_omega():
    rng = np.random.default_rng(4)
    img = ns.GrayImage(rng.random((16, 16)))
    mask = np.zeros((16, 16), dtype=bool)
    mask[6:10, 5:9] = True
    dom = ns.extract_domain(img, mask)
    out = ns.scatter(np.zeros(dom.n_omega), dom, img)
    assert np.all(out.data[mask] == 0.0)
    assert np.array_equal(out.data[~mask], img.data[~mask])


def test_scatter_length_mismatch():
    img = ns.GrayImage(np.zeros((12, 12)))
    mask = np.zeros((12, 12))
    mask[5, 5] = 1
    dom = ns.extract_domain(img, mask)
    with pytest.raises(ns.LengthMismatch):
        ns.scatter(np.zeros(3), dom, img)


def test_restrict_shape_mismatch():
    img = ns.GrayImage(np.zeros((12, 12)))
    mask = np.zeros((12, 12))
    mask[5, 5] = 1
    dom = ns.extract_domain(img, mask)
    with pytest.raises(ns.ShapeMismatch):
        ns.restrict(ns.GrayImage(np.zeros((13, 12))), dom, "omega")
