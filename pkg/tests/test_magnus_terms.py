import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import annealsim as qa


def random_antihermitian(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (m - m.conj().T)


def random_quadratic(rng, dim):
    return qa.MatrixPolynomial([random_antihermitian(rng, dim) for _ in range(3)])


def gauss_legendre_omega2(poly):
    """Independent quadrature evaluation of the second series term.

    Computes (1/2) * int_0^1 du1 int_0^u1 du2 [P(u1), P(u2)] with 64-node
    Gauss-Legendre rules on both levels, never touching the closed-form path.
    """
    nodes, weights = np.polynomial.legendre.leggauss(64)
    dim = poly.dim
    total = np.zeros((dim, dim), dtype=complex)
    for x1, w1 in zip(nodes, weights):
        u1 = 0.5 * (x1 + 1.0)
        p1 = poly(u1)
        inner = np.zeros_like(total)
        for x2, w2 in zip(nodes, weights):
            u2 = 0.5 * u1 * (x2 + 1.0)
            p2 = poly(u2)
            inner += (0.5 * u1 * w2) * (p1 @ p2 - p2 @ p1)
        total += (0.5 * w1) * inner
    return 0.5 * total


def _com(a, b):
    return a @ b - b @ a


def _third_term_integrand(p1, p2, p3):
    return _com(p1, _com(p2, p3)) + _com(p3, _com(p2, p1))


def _fourth_term_integrand(p1, p2, p3, p4):
    return (
        _com(_com(_com(p1, p2), p3), p4)
        + _com(p1, _com(_com(p2, p3), p4))
        + _com(p1, _com(p2, _com(p3, p4)))
        + _com(p2, _com(p3, _com(p4, p1)))
    )


def gauss_legendre_nested(poly, integrand, depth, prefactor, nodes=8):
    """Time-ordered iterated integral evaluated purely by quadrature.

    Recursively applies a Gauss-Legendre rule to each level of
    int_0^1 du1 int_0^u1 du2 ... of the given nested-commutator integrand.
    The integrand is polynomial in every variable, so eight nodes per level
    integrate it exactly up to roundoff.
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    dim = poly.dim

    def level(values, upper):
        if len(values) == depth:
            return integrand(*values)
        total = np.zeros((dim, dim), dtype=complex)
        for xi, wi in zip(x, w):
            u = 0.5 * upper * (xi + 1.0)
            total += (0.5 * upper * wi) * level(values + [poly(u)], u)
        return total

    return prefactor * level([], 1.0)


class TestMatrixPolynomial:
    def test_evaluation(self):
        poly = qa.MatrixPolynomial([np.eye(2), 2 * np.eye(2)])
        assert np.allclose(poly(0.5), 2.0 * np.eye(2))

    def test_commutator_degree_and_value(self):
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        z = np.diag([1.0, -1.0]).astype(complex)
        p = qa.MatrixPolynomial([x])
        q = qa.MatrixPolynomial([np.zeros((2, 2)), z])
        c = p.commutator(q)
        assert c.degree == 1
        assert np.allclose(c.coefficients[1], x @ z - z @ x)

    def test_antiderivative(self):
        poly = qa.MatrixPolynomial([np.eye(2), np.eye(2)])
        anti = poly.antiderivative()
        assert np.allclose(anti(1.0), 1.5 * np.eye(2))
        assert np.allclose(anti(0.0), np.zeros((2, 2)))

    def test_trailing_zero_trim(self):
        poly = qa.MatrixPolynomial([np.eye(2), np.zeros((2, 2))])
        assert poly.degree == 0

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            qa.MatrixPolynomial([np.zeros((2, 3))])
        with pytest.raises(ValueError):
            qa.MatrixPolynomial([np.eye(2), np.eye(3)])


class TestOmegaTerms:
    def test_time_independent_generator(self):
        rng = np.random.default_rng(3)
        c0 = random_antihermitian(rng, 4)
        poly = qa.MatrixPolynomial([c0])
        terms = qa.omega_explicit4(poly, upto=4)
        assert np.allclose(terms[0].matrix, c0, atol=1e-14)
        for term in terms[1:]:
            assert np.abs(term.matrix).max() <= 1e-14

    def test_commuting_coefficients_kill_second_term(self):
        rng = np.random.default_rng(4)
        c0 = random_antihermitian(rng, 3)
        poly = qa.MatrixPolynomial([c0, 0.7 * c0, -0.2 * c0])
        terms = qa.omega_explicit4(poly, upto=2)
        assert np.abs(terms[1].matrix).max() <= 1e-14

    def test_omega2_against_quadrature(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            poly = random_quadratic(rng, 2)
            explicit = qa.omega_explicit4(poly, upto=2)[1].matrix
            assert np.abs(explicit - gauss_legendre_omega2(poly)).max() <= 1e-12

    def test_recursive_omega2_matches_quadrature(self):
        rng = np.random.default_rng(6)
        poly = random_quadratic(rng, 2)
        recursive = qa.omega_recursive(poly, 2)[1].matrix
        assert np.abs(recursive - gauss_legendre_omega2(poly)).max() <= 1e-12

    def test_omega3_against_quadrature(self):
        rng = np.random.default_rng(14)
        for _ in range(3):
            poly = random_quadratic(rng, 2)
            explicit = qa.omega_explicit4(poly, upto=3)[2].matrix
            oracle = gauss_legendre_nested(poly, _third_term_integrand, 3, 1.0 / 6.0)
            assert np.abs(explicit - oracle).max() <= 1e-12

    def test_omega4_against_quadrature(self):
        rng = np.random.default_rng(15)
        for _ in range(2):
            poly = random_quadratic(rng, 2)
            explicit = qa.omega_explicit4(poly, upto=4)[3].matrix
            oracle = gauss_legendre_nested(poly, _fourth_term_integrand, 4, 1.0 / 12.0)
            assert np.abs(explicit - oracle).max() <= 1e-12

    def test_first_terms_agree_across_paths(self):
        rng = np.random.default_rng(7)
        poly = random_quadratic(rng, 4)
        explicit = qa.omega_explicit4(poly, upto=1)[0].matrix
        recursive = qa.omega_recursive(poly, 1)[0].matrix
        assert np.allclose(explicit, recursive, atol=1e-14)

    def test_cross_path_sample(self):
        rng = np.random.default_rng(8)
        for _ in range(25):
            for dim in (2, 4):
                poly = random_quadratic(rng, dim)
                explicit = qa.omega_explicit4(poly, upto=4)
                recursive = qa.omega_recursive(poly, 4)
                for a, b in zip(explicit, recursive):
                    assert np.abs(a.matrix - b.matrix).max() <= 1e-11

    def test_terms_stay_antihermitian(self):
        rng = np.random.default_rng(9)
        poly = random_quadratic(rng, 4)
        for term in qa.omega_recursive(poly, 6):
            defect = np.abs(term.matrix + term.matrix.conj().T).max()
            assert defect <= 1e-12

    def test_degree_guard_on_explicit_path(self):
        poly = qa.MatrixPolynomial([np.eye(2)] * 4)
        with pytest.raises(qa.SolverConfigError):
            qa.omega_explicit4(poly)

    def test_order_guards(self):
        poly = qa.MatrixPolynomial([np.eye(2)])
        with pytest.raises(qa.SolverConfigError):
            qa.omega_recursive(poly, 9)
        with pytest.raises(qa.SolverConfigError):
            qa.omega_recursive(poly, 0)
        with pytest.raises(qa.SolverConfigError):
            qa.omega_explicit4(poly, upto=5)


class TestExponentiation:
    def test_zero_gives_identity(self):
        assert np.allclose(qa.exponentiate_omega(np.zeros((3, 3))), np.eye(3))

    def test_pauli_x_rotation(self):
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        u = qa.exponentiate_omega(-0.5j * np.pi * x)
        assert np.allclose(u, -1j * x, atol=1e-14)

    def test_unitary_for_random_input(self):
        rng = np.random.default_rng(10)
        omega = random_antihermitian(rng, 16)
        u = qa.exponentiate_omega(omega)
        assert np.abs(u @ u.conj().T - np.eye(16)).max() <= 1e-13

    def test_rejects_non_antihermitian(self):
        with pytest.raises(qa.NumericalError):
            qa.exponentiate_omega(np.eye(2))

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            qa.exponentiate_omega(np.zeros((2, 3)))


class TestStepPolynomial:
    def test_constant_schedule_single_coefficient(self):
        sched = qa.schedule_from_functions(lambda s: 0.0, lambda s: 1.0)
        model = qa.IsingModel.from_terms({(1,): 1.0})
        tau, t0, t1 = 2.0, 0.5, 1.0
        poly = qa.build_step_polynomial(model, sched, None, tau, t0, t1)
        assert poly.degree == 0
        width = (t1 - t0) / tau
        expected = -1j * tau * width * np.diag(qa.ising_diagonal(model))
        assert np.allclose(poly.coefficients[0], expected, atol=1e-14)

    def test_linear_schedule_is_degree_one(self, linear):
        model = qa.IsingModel.from_terms({(1,): 1.0})
        poly = qa.build_step_polynomial(model, linear, None, 1.0, 0.25, 0.5)
        assert poly.degree == 1

    def test_circular_fit_residual_small_step(self, circular):
        model = qa.IsingModel.from_terms({(1,): 1.0})
        tau = 1.0
        t0, t1 = 0.40, 0.41
        poly = qa.build_step_polynomial(model, circular, None, tau, t0, t1)
        width = t1 - t0
        scale = np.abs(poly(0.0)).max()
        for u in (0.13, 0.77):
            s = t0 + u * width
            exact = -1j * tau * width * qa.hamiltonian_at(model, circular, s)
            assert np.abs(poly(u) - exact).max() <= 1e-7 * max(scale, 1e-30)

    def test_interval_validation(self, circular):
        model = qa.IsingModel.from_terms({(1,): 1.0})
        with pytest.raises(ValueError):
            qa.build_step_polynomial(model, circular, None, 1.0, 0.6, 0.5)

    def test_engine_matches_explicit_path(self, five_spin, circular):
        from annealsim.magnus import _StepEngine, _step_grid

        engine = _StepEngine(five_spin, circular, None)
        starts, widths = _step_grid(16, ())
        batch = engine.omega_batch(starts, widths, 3.0, 4)
        for k in (0, 7, 15):
            poly = qa.build_step_polynomial(
                five_spin, circular, None, 3.0, starts[k] * 3.0, (starts[k] + widths[k]) * 3.0
            )
            direct = qa.omega_total(qa.omega_explicit4(poly, 4))
            assert np.abs(direct - batch[k]).max() <= 1e-12


class TestErrorMetrics:
    def test_identical(self):
        rho = np.eye(2) / 2
        assert qa.error_max(rho, rho) == 0.0
        assert qa.error_mean(rho, rho) == 0.0

    def test_single_entry_difference(self):
        a = np.zeros((2, 2))
        b = a.copy()
        b[0, 1] = 0.1
        assert qa.error_max(a, b) == pytest.approx(0.1)
        assert qa.error_mean(a, b) == pytest.approx(0.025)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            qa.error_max(np.eye(2), np.eye(3))

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30)
    def test_mean_bounded_by_max(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.normal(size=(4, 4))
        b = rng.normal(size=(4, 4))
        assert qa.error_mean(a, b) <= qa.error_max(a, b) + 1e-15
