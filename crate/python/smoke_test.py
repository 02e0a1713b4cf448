"""Smoke test for the adaptive_pca_py extension module.

Build and install the module first, e.g.

    pip install maturin
    maturin develop -m crates/python/Cargo.toml --release

then run ``python python/smoke_test.py``.
"""

import adaptive_pca_py as ap


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def check_orthonormal(vectors, tol=1e-8):
    for i, u in enumerate(vectors):
        for j, v in enumerate(vectors):
            target = 1.0 if i == j else 0.0
            assert abs(dot(u, v) - target) <= tol, (i, j, dot(u, v))


def main():
    x = ap.synth("lowrank", 50, 30, seed=3, rank=5, sigma=0.0)
    assert len(x) == 30 and len(x[0]) == 50

    batch = ap.dual_pca(x)
    curve = ap.explained_variance(batch, x)
    assert abs(curve[4] - 1.0) < 1e-9, curve[:6]
    lambdas = batch.eigenvalues
    assert all(a >= b for a, b in zip(lambdas, lambdas[1:]))

    model = ap.AdaptivePca(space_limit=10)
    model.fit(x)
    assert model.n == 30
    check_orthonormal(model.components)
    adaptive = ap.explained_variance(model.eigen_space(), x)
    assert all(b >= a - 1e-12 for a, b in zip(adaptive, adaptive[1:]))
    gap = ap.curve_gap(adaptive, curve)
    assert 0.0 <= gap <= 100.0

    stochastic = ap.AdaptivePca(space_limit=6, processing_limit=8, seed=1)
    for row in x:
        stochastic.partial_fit(row)
    counts = [c for step, c in stochastic.dot_products_per_step() if step > 9]
    assert len(set(counts)) == 1, counts
    assert stochastic.dot_products == sum(c for _, c in stochastic.dot_products_per_step())

    wave = ap.synth("traveling_wave", 64, 40)
    space = ap.dual_pca(wave)
    f = ap.eigenfunctions(space, wave)
    assert len(f) == 2 and len(f[0]) == 40
    # Two components span the wave, so they carry all of each sample's energy.
    for t, row in enumerate(wave):
        assert abs(f[0][t] ** 2 + f[1][t] ** 2 - dot(row, row)) < 1e-9

    oja = ap.Oja([1.0] + [0.0] * 49, 0.01)
    for row in x:
        oja.update(row)
    assert abs(dot(oja.component, oja.component) - 1.0) < 1e-12

    try:
        ap.AdaptivePca(space_limit=3).fit([x[0], x[0], x[1]])
    except ap.PcaError:
        pass
    else:
        raise AssertionError("identical first samples must be rejected")

    try:
        import numpy as np
    except ImportError:
        np = None
    if np is not None:
        arr = np.asarray(x)
        assert abs(ap.explained_variance(ap.dual_pca(arr), arr)[4] - 1.0) < 1e-9

    print("adaptive_pca_py smoke test passed: gap %.3f pp, %d dot products" % (gap, model.dot_products))


if __name__ == "__main__":
    main()
