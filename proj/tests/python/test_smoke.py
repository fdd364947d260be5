"""End-to-end checks of the Python bindings."""

import numpy as np
import tmnn


def random_tensor(shape, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def bcirc(x):
    n1, n2, n3 = x.shape
    m = np.zeros((n1 * n3, n2 * n3), dtype=complex)
    for r in range(n3):
        for c in range(n3):
            m[r * n1 : (r + 1) * n1, c * n2 : (c + 1) * n2] = x[:, :, (r - c) % n3]
    return m


def nuclear_norm(m):
    return np.linalg.svd(m, compute_uv=False).sum()


def test_fft_round_trips():
    x = random_tensor((8, 6, 4), seed=0)
    assert np.allclose(tmnn.ifft2_per_frame(tmnn.fft2_per_frame(x)), x, atol=1e-12)
    assert np.allclose(tmnn.idft3(tmnn.dft3(x)), x, atol=1e-12)
    assert np.isclose(np.linalg.norm(tmnn.dft3(x)), np.linalg.norm(x))


def test_tsvd_reconstructs_the_input():
    x = random_tensor((5, 4, 3), seed=1)
    u, s, v = tmnn.t_svd(x)
    recon = tmnn.t_product(u, tmnn.t_product(s, tmnn.conj_transpose(v)))
    assert np.allclose(recon, x, atol=1e-10)
    assert u.shape == (5, 4, 3)
    assert s.shape == (4, 4, 3)
    assert v.shape == (4, 4, 3)


def test_norms_match_numpy_oracles():
    x = random_tensor((3, 4, 5), seed=2)
    assert np.isclose(tmnn.tnn(x), nuclear_norm(bcirc(x)) / 5.0, rtol=1e-8)
    cas = x.reshape(12, 5, order="F")
    assert np.isclose(tmnn.casorati_nn(x), nuclear_norm(cas), rtol=1e-10)


def test_prox_operators_shrink():
    m = np.diag([3.0 + 0j, 1.0 + 0j])
    z = tmnn.svt(m, 2.0)
    assert np.allclose(z, np.diag([1.0, 0.0]), atol=1e-12)

    x = random_tensor((4, 4, 3), seed=3)
    y = tmnn.tsvt(x, 0.5)
    assert tmnn.tnn(y) < tmnn.tnn(x)
    assert np.linalg.norm(y) < np.linalg.norm(x)


def test_phantom_and_masks():
    x = tmnn.make_phantom(n1=16, n2=16, n3=4, seed=7)
    assert x.shape == (16, 16, 4)
    assert np.all(np.isfinite(x))
    assert np.array_equal(x, tmnn.make_phantom(n1=16, n2=16, n3=4, seed=7))

    mask = tmnn.pseudo_radial_mask(16, 16, 4, lines=6)
    assert mask.shape == (16, 16, 4)
    assert mask.dtype == bool
    assert mask[8, 8, :].all()  # the k-space center is always acquired

    rmask = tmnn.variable_density_mask(16, 16, 4, ratio=0.4, seed=1)
    assert rmask.sum() == round(0.4 * 16 * 16) * 4


def test_adjoint_identity():
    mask = tmnn.variable_density_mask(8, 8, 3, ratio=0.5, seed=2)
    x = random_tensor((8, 8, 3), seed=4)
    y = np.where(mask, random_tensor((8, 8, 3), seed=5), 0)
    lhs = np.vdot(tmnn.apply_A(x, mask), y)
    rhs = np.vdot(x, tmnn.apply_A_star(y, mask))
    assert np.isclose(lhs, rhs, rtol=1e-12)


def test_exact_recovery_with_full_sampling():
    x = tmnn.make_phantom(n1=8, n2=8, n3=2)
    full = np.ones((8, 8, 2), dtype=bool)
    b = tmnn.apply_A(x, full)
    res = tmnn.solve(b, full, 0.0, 0.0, allow_pure_data_consistency=True)
    err = np.linalg.norm(res["reconstruction"] - x) / np.linalg.norm(x)
    assert err < 1e-10


def test_undersampled_solve_beats_zero_filling():
    x = tmnn.make_phantom(n1=16, n2=16, n3=4)
    mask = tmnn.pseudo_radial_mask(16, 16, 4, lines=6)
    b = tmnn.add_noise(tmnn.apply_A(x, mask), mask, 25.0, seed=3)
    res = tmnn.solve(b, mask, 0.05, 0.05, max_iters=80)
    assert res["iters"] <= 80
    assert len(res["cost_trace"]) == res["iters"]
    assert len(res["primal_residuals"]) == res["iters"]
    zf = tmnn.apply_A_star(b, mask)
    assert tmnn.snr_db(x, res["reconstruction"]) > tmnn.snr_db(x, zf)


def test_objective_matches_numpy():
    x = random_tensor((8, 8, 3), seed=6)
    mask = tmnn.pseudo_radial_mask(8, 8, 3, lines=4)
    b = np.where(mask, random_tensor((8, 8, 3), seed=7), 0)
    got = tmnn.objective(x, b, mask, 0.3, 0.7)
    resid = tmnn.apply_A(x, mask) - b
    want = (
        0.5 * np.linalg.norm(resid) ** 2
        + 0.3 * tmnn.tnn(x)
        + 0.7 * tmnn.casorati_nn(x)
    )
    assert np.isclose(got, want, rtol=1e-12)


def test_file_round_trips(tmp_path):
    x = random_tensor((3, 4, 2), seed=8)
    p = tmp_path / "x.ctn3"
    tmnn.save_tensor(str(p), x)
    assert np.array_equal(tmnn.load_tensor(str(p)), x)

    mask = tmnn.variable_density_mask(8, 8, 2, ratio=0.5, seed=9)
    q = tmp_path / "m.ctn3"
    tmnn.save_mask(str(q), mask)
    assert np.array_equal(tmnn.load_mask(str(q)), mask)
