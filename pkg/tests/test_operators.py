import numpy as np
import pytest

import nsinpaint as ns


def make_domain(shape=(14, 14), hole=(slice(4, 10), slice(4, 10))):
    img = ns.GrayImage(np.zeros(shape))
    mask = np.zeros(shape, dtype=bool)
    mask[hole] = True
    return ns.extract_domain(img, mask)


# ---------------------------------------------------------------------------
# dense oracles, built straight from the stencil definitions (independent of
# the sparse assembly path)

def dense_operator_oracle(domain, name):
    """Dense Omega x Omega' matrix from pointwise stencil coefficients."""
    def stencil(name):
        if name == "D1":
            return {(1, 0): 0.5, (-1, 0): -0.5}
        if name == "D2":
            return {(0, 1): 0.5, (0, -1): -0.5}
        if name == "Lap":
            return {(1, 0): 1.0, (-1, 0): 1.0, (0, 1): 1.0, (0, -1): 1.0, (0, 0): -4.0}
        raise ValueError(name)

    if name in ("D1", "D2", "Lap"):
        coeffs = [stencil(name)]
    elif name in ("D1Lap", "D2Lap"):
        # composition: convolve the two stencils
        outer = stencil(name[:2])
        inner = stencil("Lap")
        combined = {}
        for (a, b), c1 in outer.items():
            for (p, q), c2 in inner.items():
                key = (a + p, b + q)
                combined[key] = combined.get(key, 0.0) + c1 * c2
        coeffs = [combined]
    mat = np.zeros((domain.n_omega, domain.n_omega_prime))
    for row, (i, j) in enumerate(domain.omega):
        for (di, dj), c in coeffs[0].items():
            mat[row, domain.idx_omega_prime[(int(i) + di, int(j) + dj)]] += c
    return mat


def grid_function(domain, fn):
    """Sample fn(i, j) on Omega' in natural order."""
    return np.array([fn(int(i), int(j)) for i, j in domain.omega_prime], dtype=float)


def test_stencils_annihilate_constants():
    dom = make_domain()
    ops = ns.build_operators(dom)
    u = grid_function(dom, lambda i, j: 3.25)
    for op in (ops.d1, ops.d2, ops.lap, ops.d1lap, ops.d2lap):
        assert np.allclose(op.apply(u), 0.0, atol=1e-14)


def test_stencils_exact_on_low_order_polynomials():
    dom = make_domain()
    ops = ns.build_operators(dom)
    u_i = grid_function(dom, lambda i, j: float(i))
    assert np.allclose(ops.d1.apply(u_i), 1.0)
    assert np.allclose(ops.d2.apply(u_i), 0.0, atol=1e-14)
    assert np.allclose(ops.lap.apply(u_i), 0.0, atol=1e-14)

    u_ii = grid_function(dom, lambda i, j: float(i * i))
    assert np.allclose(ops.lap.apply(u_ii), 2.0)

    u_par = grid_function(dom, lambda i, j: float(i * i + j * j))
    assert np.allclose(ops.lap.apply(u_par), 4.0)

    # exactness set {1, i, j, ij, i^2, j^2} for the matching operator
    u_ij = grid_function(dom, lambda i, j: float(i * j))
    assert np.allclose(ops.lap.apply(u_ij), 0.0, atol=1e-13)
    mid_i = np.array([float(i) for i, j in dom.omega])
    mid_j = np.array([float(j) for i, j in dom.omega])
    assert np.allclose(ops.d1.apply(u_ij), mid_j)
    assert np.allclose(ops.d2.apply(u_ij), mid_i)


def test_apply_zero_vector():
    dom = make_domain()
    ops = ns.build_operators(dom)
    z = np.zeros(dom.n_omega_prime)
    assert np.array_equal(ops.d1.apply(z), np.zeros(dom.n_omega))


def test_row_patterns_match_stencils():
    dom = make_domain((16, 16), (slice(4, 11), slice(5, 12)))
    ops = ns.build_operators(dom)
    for op, max_nnz, values in (
        (ops.d1, 2, {0.5, -0.5}),
        (ops.d2, 2, {0.5, -0.5}),
        (ops.lap, 5, {1.0, -4.0}),
    ):
        csr = op.matrix
        row_counts = np.diff(csr.indptr)
        assert row_counts.max() <= max_nnz, op.name
        assert set(np.unique(csr.data)) <= values, op.name
        assert csr.shape == (dom.n_omega, dom.n_omega_prime)


def test_apply_matches_dense_oracle():
    rng = np.random.default_rng(11)
    dom = make_domain((16, 16), (slice(5, 11), slice(4, 12)))
    ops = ns.build_operators(dom)
    v = rng.standard_normal(dom.n_omega_prime)
    for name, op in ops.as_dict().items():
        dense = dense_operator_oracle(dom, name)
        assert np.allclose(op.apply(v), dense @ v, rtol=1e-12, atol=1e-12), name


def test_apply_length_mismatch():
    dom = make_domain()
    ops = ns.build_operators(dom)
    with pytest.raises(ns.LengthMismatch):
        ops.d1.apply(np.zeros(dom.n_omega_prime + 1))
    with pytest.raises(ns.LengthMismatch):
        ops.d1.apply_adjoint(np.zeros(dom.n_omega + 1))


def test_adjoint_inner_product_identity():
    rng = np.random.default_rng(12)
    dom = make_domain((16, 16), (slice(4, 11), slice(5, 11)))
    ops = ns.build_operators(dom)
    for name, op in ops.as_dict().items():
        for _ in range(5):
            v = rng.standard_normal(dom.n_omega_prime)
            w = rng.standard_normal(dom.n_omega)
            lhs = float(op.apply(v) @ w)
            rhs = float(v @ op.apply_adjoint(w))
            scale = np.linalg.norm(v) * np.linalg.norm(w)
            assert abs(lhs - rhs) <= 1e-12 * scale, name


def test_adjoint_zero_and_dense_transpose():
    rng = np.random.default_rng(13)
    dom = make_domain()
    ops = ns.build_operators(dom)
    assert np.array_equal(
        ops.d1.apply_adjoint(np.zeros(dom.n_omega)), np.zeros(dom.n_omega_prime)
    )
    w = rng.standard_normal(dom.n_omega)
    dense = dense_operator_oracle(dom, "D1")
    assert np.allclose(ops.d1.apply_adjoint(w), dense.T @ w, rtol=1e-12, atol=1e-14)


def test_composition_matches_full_grid_oracle():
    # D1Lap v must equal D1(Lap(.)) computed on the full grid by plain
    # array slicing, sampled on Omega
    rng = np.random.default_rng(14)
    shape = (18, 16)
    img_data = rng.random(shape)
    img = ns.GrayImage(img_data)
    mask = np.zeros(shape, dtype=bool)
    mask[5:12, 4:11] = True
    dom = ns.extract_domain(img, mask)
    ops = ns.build_operators(dom)
    u_prime = ns.restrict(img, dom, "omega_prime")

    lap = np.zeros(shape)
    lap[1:-1, 1:-1] = (
        img_data[2:, 1:-1]
        + img_data[:-2, 1:-1]
        + img_data[1:-1, 2:]
        + img_data[1:-1, :-2]
        - 4 * img_data[1:-1, 1:-1]
    )
    d1lap = np.zeros(shape)
    d1lap[1:-1, :] = 0.5 * (lap[2:, :] - lap[:-2, :])
    expected = d1lap[dom.omega[:, 0], dom.omega[:, 1]]
    assert np.allclose(ops.d1lap.apply(u_prime), expected, rtol=1e-12, atol=1e-13)


# ---------------------------------------------------------------------------
# preconditioner

def test_one_pixel_preconditioner():
    dom = make_domain((9, 9), (slice(4, 5), slice(4, 5)))
    fact = ns.factor_preconditioner(dom)
    assert fact.dimension == 1
    assert np.allclose(fact.matrix.toarray(), [[5.0]])
    assert fact.solve(np.array([5.0])) == pytest.approx([1.0])


def test_solve_round_trip():
    rng = np.random.default_rng(15)
    dom = make_domain((16, 16), (slice(4, 12), slice(4, 12)))
    fact = ns.factor_preconditioner(dom)
    for _ in range(5):
        x = rng.standard_normal(dom.n_omega)
        y = fact.matrix @ x
        assert np.allclose(fact.solve(y), x, rtol=1e-12, atol=1e-12)


def test_solve_residual_small():
    rng = np.random.default_rng(16)
    dom = make_domain((16, 16), (slice(4, 12), slice(4, 12)))
    fact = ns.factor_preconditioner(dom)
    for k in (1, 2, 3):
        y = rng.standard_normal(dom.n_omega)
        x = fact.solve_k(y, k)
        for _ in range(k):
            x = fact.matrix @ x
        assert np.linalg.norm(x - y) / np.linalg.norm(y) <= 1e-10


def test_spd_quadratic_form():
    rng = np.random.default_rng(17)
    dom = make_domain((14, 14), (slice(4, 10), slice(5, 10)))
    fact = ns.factor_preconditioner(dom)
    for _ in range(10):
        x = rng.standard_normal(dom.n_omega)
        assert float(x @ (fact.matrix @ x)) > 0.0


@pytest.mark.parametrize("n", [3, 5, 8])
def test_eigenvalues_match_closed_form_and_dense_oracle(n):
    shape = (n + 8, n + 8)
    dom = make_domain(shape, (slice(4, 4 + n), slice(4, 4 + n)))
    fact = ns.factor_preconditioner(dom)
    dense = fact.matrix.toarray()
    got = np.sort(np.linalg.eigvalsh(dense))
    closed = np.sort(
        [1.0 + ns.dirichlet_eigenvalue(p, q, n) for p in range(1, n + 1) for q in range(1, n + 1)]
    )
    assert np.allclose(got, closed, rtol=1e-12, atol=1e-12)
    # inverse spectrum
    inv = np.sort(np.linalg.eigvalsh(np.linalg.inv(dense)))
    assert np.allclose(inv, np.sort(1.0 / closed), rtol=1e-10, atol=1e-12)


def test_solve_k_composition_and_dense_power_oracle():
    rng = np.random.default_rng(18)
    dom = make_domain((16, 16), (slice(5, 11), slice(5, 12)))
    fact = ns.factor_preconditioner(dom)
    y = rng.standard_normal(dom.n_omega)
    one = fact.solve_k(y, 1)
    assert np.allclose(one, fact.solve(y))
    two = fact.solve_k(y, 2)
    assert np.allclose(two, fact.solve_k(fact.solve_k(y, 1), 1), rtol=1e-12, atol=1e-14)
    dense_inv = np.linalg.inv(fact.matrix.toarray())
    for k in (1, 2, 3):
        expected = np.linalg.matrix_power(dense_inv, k) @ y
        got = fact.solve_k(y, k)
        assert np.linalg.norm(got - expected) / np.linalg.norm(expected) <= 1e-10


def test_solve_k_validates_inputs():
    dom = make_domain()
    fact = ns.factor_preconditioner(dom)
    with pytest.raises(ValueError):
        fact.solve_k(np.zeros(fact.dimension), 4)
    with pytest.raises(ns.LengthMismatch):
        fact.solve_k(np.zeros(fact.dimension + 2), 1)
    # module-level alias
    assert np.allclose(
        ns.solve_k(fact, np.ones(fact.dimension), 1), fact.solve(np.ones(fact.dimension))
    )
