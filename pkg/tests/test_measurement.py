import numpy as np
import pytest

from qmeas import (
    CompletenessError,
    ConfigError,
    ImpossibleOutcomeError,
    Measurement,
    empirical_triple,
    family,
    haar_random_state,
    info_triple,
    optimal_estimate,
    optimal_reversal,
    post_measurement,
    random_kraus_batch,
    random_measurement,
    random_unitary,
    triple_from_singulars,
    validate,
)
from qmeas.linalg import dagger


def vn_measurement(d=3):
    ops = np.zeros((d, d, d), dtype=complex)
    for r in range(d):
        ops[r, r, r] = 1.0
    return Measurement(ops)


def test_validate_examples():
    ok, dev = validate(vn_measurement().kraus)
    assert ok and dev < 1e-15
    ok, dev = validate([np.eye(3, dtype=complex), np.diag([0.1, 0, 0]).astype(complex)])
    assert not ok
    assert abs(dev - 0.01) < 1e-12


def test_constructor_rejects_bad_stacks():
    with pytest.raises(ConfigError):
        Measurement(np.zeros((2, 3)))  # not a stack
    with pytest.raises(ConfigError):
        Measurement(np.zeros((1, 2, 3), dtype=complex))  # non-square
    with pytest.raises(ConfigError):
        Measurement(np.ones((1, 1, 1), dtype=complex))  # dim < 2
    with pytest.raises(CompletenessError):
        Measurement([np.eye(3) * 0.5])


def test_unitary_triple_exact():
    for d in (2, 3, 5):
        u = random_unitary(d, np.random.default_rng(d))
        g, f, r = info_triple(Measurement(u[None]))
        assert abs(g - 1.0 / d) < 1e-12
        assert abs(f - 1.0) < 1e-12
        assert abs(r - 1.0) < 1e-12


def test_von_neumann_triple_exact():
    g, f, r = info_triple(vn_measurement())
    assert abs(g - 0.5) < 1e-12
    assert abs(f - 0.5) < 1e-12
    assert abs(r) < 1e-15


def test_two_outcome_family_triple():
    # diag(1, sqrt(1-p), 1) / diag(0, sqrt(p), 0) at p = 0.36
    g, f, r = info_triple(family(4, 0.36))
    assert abs(g - 4.36 / 12) < 1e-12
    assert abs(f - 2.8 / 3) < 1e-12
    assert abs(r - 0.64) < 1e-12


def test_triple_only_depends_on_singular_values():
    # multiplying each Kraus operator by a unitary on the left changes
    # nothing: same singular values, same triple
    rng = np.random.default_rng(21)
    m = random_measurement(3, 4, rng)
    rotated = np.stack([random_unitary(3, rng) @ op for op in m.kraus])
    a = info_triple(m)
    b = info_triple(Measurement(rotated))
    assert max(abs(a.G - b.G), abs(a.F - b.F), abs(a.R - b.R)) < 1e-12


def test_triple_from_singulars_sort_agnostic():
    sv = np.array([[0.2, 0.9, 0.5]])
    a = triple_from_singulars(sv)
    b = triple_from_singulars(np.sort(sv, axis=1)[:, ::-1])
    assert max(abs(a.G - b.G), abs(a.F - b.F), abs(a.R - b.R)) < 1e-15


def test_post_measurement_probabilities():
    m = family(4, 0.36)
    psi = np.ones(3, dtype=complex) / np.sqrt(3)
    out, p = post_measurement(m, 1, psi)
    assert abs(p - 0.12) < 1e-12  # 0.36/3
    np.testing.assert_allclose(out, [0, 1, 0], atol=1e-12)
    assert abs(np.linalg.norm(out) - 1) < 1e-12

    out0, p0 = post_measurement(m, 0, psi)
    assert abs(p0 + p - 1.0) < 1e-12


def test_post_measurement_errors():
    m = vn_measurement()
    with pytest.raises(ConfigError):
        post_measurement(m, 3, np.array([1, 0, 0], dtype=complex))
    with pytest.raises(ImpossibleOutcomeError):
        post_measurement(m, 1, np.array([1, 0, 0], dtype=complex))


def test_optimal_estimate_von_neumann():
    m = vn_measurement()
    for r in range(3):
        est = optimal_estimate(m, r)
        assert abs(abs(est[r]) - 1.0) < 1e-12


def test_optimal_estimate_beats_alternatives():
    # Haar-averaged, probability-weighted estimation fidelity of a guess
    # |e> for outcome r is (tr A_r + <e|A_r|e>) / (d(d+1)) with
    # A_r = M_r^dag M_r, so the optimum is the top eigenvector.  Evaluate
    # the quadratic form directly and compare against random guesses.
    rng = np.random.default_rng(17)
    m = random_measurement(3, 3, rng)
    gram = [dagger(op) @ op for op in m.kraus]

    def score(estimates):
        return sum(
            (np.trace(a).real + (np.conj(e) @ a @ e).real) / 12.0
            for a, e in zip(gram, estimates)
        )

    best = score([optimal_estimate(m, r) for r in range(3)])
    g = info_triple(m).G
    assert abs(best - g) < 1e-12
    for _ in range(100):
        alt = [haar_random_state(3, rng) for _ in range(3)]
        assert score(alt) <= best + 1e-12


def test_optimal_reversal_closed_form():
    m = family(4, 0.36)
    rev = optimal_reversal(m, 0)
    np.testing.assert_allclose(rev.operator, np.diag([0.8, 1.0, 0.8]), atol=1e-12)
    assert abs(rev.scale - 0.8) < 1e-12
    assert abs(rev.success - 0.64) < 1e-12


def test_reversal_restores_any_state():
    rng = np.random.default_rng(23)
    m = random_measurement(3, 2, rng)
    for r in range(2):
        rev = optimal_reversal(m, r)
        if rev.scale <= 1e-12:
            continue
        prod = rev.operator @ m.kraus[r]
        np.testing.assert_allclose(prod, rev.scale * np.eye(3), atol=1e-10)
        # physical: R^dag R <= 1
        w = np.linalg.eigvalsh(dagger(rev.operator) @ rev.operator)
        assert w.max() <= 1 + 1e-10


def test_reversal_of_rank_deficient_outcome_is_null():
    rev = optimal_reversal(vn_measurement(), 0)
    assert rev.scale == 0.0
    assert rev.success == 0.0
    assert not rev.operator.any()


def test_empirical_triple_unitary():
    u = random_unitary(3, np.random.default_rng(2))
    est = empirical_triple(Measurement(u[None]), samples=20_000, seed=4)
    # F and R carry no sampling noise for a unitary (up to float rounding);
    # G keeps its Haar spread even here
    assert abs(est.F - 1.0) < 1e-12
    assert est.se_F < 1e-14
    assert abs(est.R - 1.0) < 1e-12
    assert est.se_R == 0.0
    assert est.se_G > 0
    assert abs(est.G - 1 / 3) < 3 * est.se_G


def test_empirical_triple_matches_closed_form():
    for t, p, seed in [(0, 0.5, 9), (4, 0.36, 10)]:
        m = family(t, p)
        exact = info_triple(m)
        est = empirical_triple(m, samples=50_000, seed=seed)
        assert abs(est.G - exact.G) < 3 * est.se_G
        assert abs(est.F - exact.F) < 3 * est.se_F
        assert abs(est.R - exact.R) < 1e-12  # analytic, not sampled
        g2, f2, r2 = est.as_triple()
        assert (g2, f2, r2) == (est.G, est.F, est.R)


def test_empirical_triple_deterministic_under_seed():
    m = family(0, 0.3)
    a = empirical_triple(m, samples=5000, seed=12)
    b = empirical_triple(m, samples=5000, seed=12)
    assert a == b


def test_random_kraus_batch_complete():
    rng = np.random.default_rng(31)
    batch = random_kraus_batch(3, 4, 50, rng)
    assert batch.shape == (50, 4, 3, 3)
    for kraus in batch:
        ok, dev = validate(kraus)
        assert ok and dev < 1e-12


def test_singular_values_descending():
    rng = np.random.default_rng(37)
    m = random_measurement(4, 3, rng)
    sv = m.singular_values
    assert sv.shape == (3, 4)
    assert (np.diff(sv, axis=1) <= 1e-14).all()
