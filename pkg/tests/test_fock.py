import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from clone_invert import analytic as an
from clone_invert import fock
from clone_invert.core import TruncationExceeded, validate_params
from clone_invert.fock import TruncationPolicy


def P(eta1, eta2, eta3, g1, g2=None):
    return validate_params({"eta1": eta1, "eta2": eta2, "eta3": eta3, "g1": g1, "g2": g2})


def single_mode(op, tail_tol=1e-10):
    """Wrap a single-mode operator on mode a with a_perp in vacuum, B in b."""
    d = op.shape[0]
    vac = np.zeros((d, d))
    vac[0, 0] = 1
    q = np.array([[1.0, 0.0], [0.0, 0.0]])
    return fock.product_state(op, vac, q, TruncationPolicy(n_max=d - 1, tail_tol=tail_tol))


def fock_op(d, i, j):
    m = np.zeros((d, d), dtype=complex)
    m[i, j] = 1
    return m


def random_density(d, rng):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = x @ x.conj().T
    return rho / np.trace(rho)


# ---------------------------------------------------------------------------
# loss channel


class TestLoss:
    def test_identity(self):
        s = single_mode(fock_op(4, 1, 1))
        out = fock.apply_loss(1.0, s)
        np.testing.assert_array_equal(out.terms[0].op_a, s.terms[0].op_a)

    @pytest.mark.parametrize("eta", [0.0, 0.3, 0.77, 1.0])
    def test_single_photon_damping(self, eta):
        out = fock.apply_loss(eta, single_mode(fock_op(3, 1, 1))).terms[0].op_a
        expected = eta * fock_op(3, 1, 1) + (1 - eta) * fock_op(3, 0, 0)
        np.testing.assert_allclose(out, expected, atol=1e-15)

    @pytest.mark.parametrize("eta", [0.0, 0.4, 0.9])
    def test_coherence(self, eta):
        out = fock.apply_loss(eta, single_mode(fock_op(3, 1, 0))).terms[0].op_a
        np.testing.assert_allclose(out, math.sqrt(eta) * fock_op(3, 1, 0), atol=1e-15)

    def test_kraus_completeness(self):
        for eta in (0.0, 0.25, 0.6, 0.99):
            w = fock.loss_weights(eta, 30)
            # sum_k K_k^dag K_k is diagonal with entries sum_k w[k, n-k]^2
            totals = [sum(w[k, n - k] ** 2 for k in range(n + 1)) for n in range(31)]
            np.testing.assert_allclose(totals, 1.0, atol=1e-13)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.0, 1.0), st.integers(0, 2**31))
    def test_trace_preserved(self, eta, seed):
        rho = random_density(12, np.random.default_rng(seed))
        out = fock.apply_loss(eta, single_mode(rho))
        assert abs(out.trace() - 1.0) < 1e-13

    @pytest.mark.parametrize("eta", [0.2, 0.65, 0.93])
    def test_matches_beam_splitter_dilation(self, eta):
        """Kraus sum == beam splitter with a vacuum ancilla, ancilla traced out."""
        d = 7
        rho = random_density(d, np.random.default_rng(1))
        a = fock.annihilation(d - 1)
        eye = np.eye(d)
        sys_a, anc = np.kron(a, eye), np.kron(eye, a)
        theta = math.acos(math.sqrt(eta))
        u = expm(theta * (sys_a.conj().T @ anc - sys_a @ anc.conj().T))
        vac = fock_op(d, 0, 0)
        joint = u @ np.kron(rho, vac) @ u.conj().T
        reduced = np.einsum("ikjk->ij", joint.reshape(d, d, d, d))
        out = fock.apply_loss(eta, single_mode(rho)).terms[0].op_a
        # the dilation conserves total photon number, so the cutoff is exact
        np.testing.assert_allclose(out, reduced, atol=1e-12)

    def test_mean_photon_scales(self):
        rho = random_density(10, np.random.default_rng(3))
        s = single_mode(rho)
        n0 = fock.photon_marginals(s)[0] @ np.arange(10)
        n1 = fock.photon_marginals(fock.apply_loss(0.37, s))[0] @ np.arange(10)
        assert n1 == pytest.approx(0.37 * n0, abs=1e-13)


# ---------------------------------------------------------------------------
# squeezer


def squeezed_vacuum_distribution(r, n):
    p = np.zeros(n + 1)
    t2 = math.tanh(r) ** 2
    for k in range(n // 2 + 1):
        p[2 * k] = math.comb(2 * k, k) / 4**k * t2**k / math.cosh(r)
    return p


class TestSqueezer:
    def test_zero_is_identity(self):
        rho = random_density(10, np.random.default_rng(0))
        s = single_mode(rho, tail_tol=1.0)
        out = fock.apply_squeezer(0.0, s, "a")
        np.testing.assert_allclose(out.terms[0].op_a, rho, atol=1e-14)

    @pytest.mark.parametrize("r", [0.2, 0.6, 1.0, 1.2])
    def test_squeezed_vacuum_distribution(self, r):
        pol = TruncationPolicy.for_gain(r)
        s = single_mode(fock_op(pol.n_max + 1, 0, 0))
        s.policy = pol
        out = fock.apply_squeezer(r, s, "a")
        p = fock.photon_marginals(out)[0]
        np.testing.assert_allclose(p, squeezed_vacuum_distribution(r, out.n_max), atol=1e-12)
        assert p @ np.arange(len(p)) == pytest.approx(math.sinh(r) ** 2, abs=1e-9)

    def test_sign_convention_quadrature(self):
        """exp[(r/2)(a^dag^2 - a^2)] stretches x = a + a^dag: <x^2> = e^{2r}."""
        r, pol = 0.5, TruncationPolicy.for_gain(0.5)
        s = single_mode(fock_op(pol.n_max + 1, 0, 0))
        s.policy = pol
        rho = fock.apply_squeezer(r, s, "a").terms[0].op_a
        a = fock.annihilation(rho.shape[0] - 1)
        x = a + a.T
        assert np.real(np.trace(rho @ x @ x)) == pytest.approx(math.exp(2 * r), abs=1e-9)

    @pytest.mark.parametrize("r", [0.3, 0.8, 1.2])
    def test_round_trip(self, r):
        pol = TruncationPolicy.for_gain(r)
        s = fock.build_initial_state(pol)
        out = fock.apply_squeezer(-r, fock.apply_squeezer(r, s, "a"), "a")
        diff = max(np.abs(t.op_a - u.op_a).max() for t, u in zip(out.terms, s.padded(out.n_max).terms))
        assert diff <= 1e-10

    def test_truncation_exceeded_without_growth(self):
        pol = TruncationPolicy(n_max=10, auto_grow=False)
        with pytest.raises(TruncationExceeded) as err:
            fock.apply_squeezer(1.0, fock.build_initial_state(pol), "a", stage="probe")
        assert err.value.stage == "probe"
        assert "probe" in str(err.value)

    def test_auto_grow(self):
        pol = TruncationPolicy(n_max=10, auto_grow=True)
        out = fock.apply_squeezer(1.0, fock.build_initial_state(pol), "a")
        assert out.n_max > 10
        assert out.trace_drift < pol.tail_tol * 10

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            fock.apply_squeezer(0.1, fock.build_initial_state(), "b")


# ---------------------------------------------------------------------------
# states and measurement


class TestInitialState:
    def test_singlet(self):
        s = fock.build_initial_state(TruncationPolicy(n_max=3))
        assert s.trace() == 1.0
        r = fock.measure_witness(s)
        assert r.corr_xx + r.corr_yy + r.corr_zz == pytest.approx(-3.0, abs=1e-14)
        assert r.witness == pytest.approx(2.0, abs=1e-14)
        assert r.n_a == 1.0

    def test_dense_is_pure(self):
        rho = fock.build_initial_state(TruncationPolicy(n_max=2)).to_dense()
        assert rho.shape == (18, 18)
        np.testing.assert_allclose(rho @ rho, rho, atol=1e-15)
        assert np.trace(rho) == pytest.approx(1.0)

    def test_a_reduction_is_isotropic(self):
        s = fock.build_initial_state(TruncationPolicy(n_max=3))
        rho = s.to_dense()
        d = 4
        a = fock.annihilation(3)
        eye = np.eye(d)
        modes = [np.kron(np.kron(a, eye), np.eye(2)), np.kron(np.kron(eye, a), np.eye(2))]
        for axis in "xyz":
            m = fock.stokes_matrix(axis)
            j = sum(m[p, q] * modes[p].conj().T @ modes[q] for p in range(2) for q in range(2))
            assert abs(np.trace(rho @ j)) < 1e-15
        # B photon number is exactly one
        assert np.real(np.trace(rho)) == pytest.approx(1.0)

    def test_product_state_saturates(self):
        d = 3
        q = np.array([[1.0, 0.0], [0.0, 0.0]])  # B photon in b_0, same as the A photon
        s = fock.product_state(fock_op(d, 1, 1), fock_op(d, 0, 0), q)
        assert fock.measure_witness(s).witness == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("eta", [0.0, 0.35, 0.8])
    def test_singlet_with_loss(self, eta):
        s = fock.build_initial_state(TruncationPolicy(n_max=3))
        s = fock.apply_loss(eta, fock.apply_loss(eta, s, "a"), "a_perp")
        assert fock.measure_witness(s).witness == pytest.approx(2 * eta, abs=1e-14)


class TestStokes:
    @pytest.mark.parametrize("axis", "xyz")
    @pytest.mark.parametrize("phi", [0.0, 0.4, math.pi / 4, 2.0])
    def test_pauli_like(self, axis, phi):
        m = fock.stokes_matrix(axis, phi)
        np.testing.assert_allclose(m, m.conj().T, atol=1e-15)
        np.testing.assert_allclose(m @ m, np.eye(2), atol=1e-15)
        assert abs(np.trace(m)) < 1e-15

    def test_anticommute(self):
        x, y, z = (fock.stokes_matrix(k) for k in "xyz")
        for p, q in ((x, y), (y, z), (z, x)):
            np.testing.assert_allclose(p @ q + q @ p, 0, atol=1e-15)

    def test_x_is_diagonal_in_phi_zero_basis(self):
        np.testing.assert_allclose(fock.stokes_matrix("x", 0.0), np.diag([1, -1]), atol=1e-15)


class TestDenseAgreement:
    @pytest.fixture(scope="class")
    @classmethod
    def evolved(cls):
        pol = TruncationPolicy(n_max=10, tail_tol=1e-3, auto_grow=False)
        s = fock.build_initial_state(pol)
        for eta, g in ((0.85, 0.3), (0.9, -0.3), (0.8, None)):
            s = fock.apply_loss(eta, fock.apply_loss(eta, s, "a"), "a_perp")
            if g is not None:
                s = fock.apply_cloner(g, s)
        return s

    def test_measurement_matches_dense_operators(self, evolved):
        fast = fock.measure_witness(evolved)
        dense = fock.measure_witness_dense(evolved.to_dense(), evolved.n_max)
        for k in ("corr_xx", "corr_yy", "corr_zz", "n_a", "witness"):
            assert getattr(fast, k) == pytest.approx(getattr(dense, k), abs=1e-12)

    def test_hermitian_and_psd(self, evolved):
        rho = evolved.to_dense()
        assert np.abs(rho - rho.conj().T).max() < 1e-12
        assert np.linalg.eigvalsh(rho).min() > -1e-10
        assert abs(np.trace(rho) - evolved.trace()) < 1e-14


# ---------------------------------------------------------------------------
# full pipeline


def exact_mismatch_witness(p):
    """Heisenberg-picture witness for g2 != g1, derived independently of the
    published formulas: U^-1(g2) U(g1) reduces to a squeeze of -eps on the
    signal and its eta1-loss vacuum, while the mid-loss vacuum sees -g2."""
    eps = p.g2 - p.g1
    return (
        2 * p.eta1 * p.eta2 * p.eta3
        - 2 * (1 - p.eta1) * p.eta2 * p.eta3 * math.sinh(eps) ** 2
        - 2 * (1 - p.eta2) * p.eta3 * math.sinh(p.g2) ** 2
    )


class TestPipeline:
    @pytest.mark.parametrize("g", [0.5, 1.0])
    def test_lossless(self, g):
        r = fock.run_pipeline(P(1, 1, 1, g))
        assert r.witness == pytest.approx(2.0, abs=1e-8)
        assert r.n_a == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("etas", [(0.3, 0.6, 0.9), (1.0, 0.5, 0.7), (0.0, 1.0, 1.0)])
    def test_pure_loss(self, etas):
        r = fock.run_pipeline(P(*etas, 0.0))
        prod = etas[0] * etas[1] * etas[2]
        assert r.n_a == pytest.approx(prod, abs=1e-10)
        assert r.witness == pytest.approx(2 * prod, abs=1e-10)

    def test_reference_point(self):
        r = fock.run_pipeline(P(0.8, 0.98, 0.8, 1.0))
        assert r.witness == pytest.approx(1.2102048689426619, abs=1e-8)
        assert r.n_a == pytest.approx(0.6713951310573382, abs=1e-8)
        assert r.n_clones_measured == pytest.approx(5.771952243950536, abs=1e-8)

    def test_zz_gain_independent_when_lossless_between(self):
        zz = [fock.run_pipeline(P(0.8, 1.0, 0.7, g)).corr_zz for g in (0.0, 0.5, 1.0)]
        assert max(zz) - min(zz) < 1e-9

    @pytest.mark.parametrize("params", [P(0.8, 0.9, 0.7, 0.6), P(1, 1, 1, 0.5), P(0.7, 0.95, 1.0, 1.0, 0.9)])
    def test_equatorial_covariance(self, params):
        a = fock.run_pipeline(params, phi=0.0)
        b = fock.run_pipeline(params, phi=math.pi / 4)
        assert abs(a.witness - b.witness) < 1e-9
        for k in ("corr_xx", "corr_yy", "corr_zz", "n_a"):
            assert abs(getattr(a, k) - getattr(b, k)) < 1e-9

    @pytest.mark.parametrize("g1,eps", [(0.7, 0.05), (0.7, -0.05), (0.5, 0.2), (1.0, -0.3)])
    def test_mismatch_matches_heisenberg_derivation(self, g1, eps):
        p = P(0.8, 0.98, 0.8, g1, g1 + eps)
        assert fock.run_pipeline(p).witness == pytest.approx(exact_mismatch_witness(p), abs=1e-8)

    def test_truncation_stage_named(self):
        with pytest.raises(TruncationExceeded) as err:
            fock.run_pipeline(P(1, 1, 1, 5.0))
        assert err.value.stage == "cloner (+g1)"

    def test_diagnostics(self):
        r = fock.run_pipeline(P(0.9, 0.9, 0.9, 0.7))
        assert r.max_tail <= 1e-10
        assert abs(r.trace - 1.0) < 1e-9
        assert set(r.stage_tails) == {"cloner (+g1)", "inverse cloner (-g2)"}


def test_marginals_csv():
    s = fock.build_initial_state(TruncationPolicy(n_max=2))
    text = fock.marginals_csv(s)
    lines = text.strip().splitlines()
    assert lines[0] == "n,p_a,p_a_perp"
    assert lines[1] == "0,0.5,0.5"
    assert lines[2] == "1,0.5,0.5"
    assert len(lines) == 4


def test_policy_validation():
    with pytest.raises(ValueError):
        TruncationPolicy(n_max=0)
    with pytest.raises(ValueError):
        TruncationPolicy(tail_tol=0.0)
    assert TruncationPolicy.for_gain(0.0).n_max >= 1
    assert TruncationPolicy.for_gain(10.0).n_max == fock.N_CEILING
