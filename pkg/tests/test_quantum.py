import math
import os
import sys
import unittest
import numpy as np
import numpy.testing as npt
sys.path.append(os.path.join(os.path.dirname(os.path.abspath(__file__)), ".."))
from jmnet.quantum import (Ket, Operator, BlochVector, KET_0, KET_1, tensor, partial_trace, permute_qubits,
                           bloch_vector, correlation_tensor, ket_from_bloch, antipodal_ket, paper_literal_ket,
                           werner_state, singlet, born_probabilities, identity, pauli_matrices, FIRST, SECOND)
from jmnet.measurements import bell_basis, ejm_basis
from jmnet.exceptions import JMNetValidationError, JMNetKindMismatchError, JMNetRangeError, JMNetUsageError


class KetTestCase(unittest.TestCase):

    def test_normalization(self):
        self.assertEqual(Ket([0, 1]).n_qubits, 1)
        npt.assert_allclose(Ket([3, 4], normalize=True).amplitudes, [0.6, 0.8])
        with self.assertRaises(JMNetValidationError):
            Ket([1, 1])
        with self.assertRaises(JMNetValidationError):
            Ket([1, 0, 0])
        with self.assertRaises(JMNetValidationError):
            Ket([0, 0], normalize=True)

    def test_immutable(self):
        ket = Ket([1, 0])
        with self.assertRaises(ValueError):
            ket.amplitudes[0] = 0

    def test_inner_and_phase(self):
        plus = Ket([1, 1], normalize=True)
        self.assertAlmostEqual(abs(KET_0.inner(plus)) ** 2, 0.5, places=12)
        self.assertAlmostEqual(plus.with_phase(1j).inner(plus), -1j, places=12)
        with self.assertRaises(JMNetValidationError):
            KET_0.inner(singlet())


class OperatorTestCase(unittest.TestCase):

    def test_density_checks(self):
        self.assertTrue(KET_0.projector().is_density())
        self.assertFalse(Operator(np.eye(2)).is_density())
        with self.assertRaises(JMNetValidationError):
            Operator(np.diag([1.5, -0.5]), density=True)
        with self.assertRaises(JMNetValidationError):
            Operator(np.eye(3))

    def test_expectation(self):
        sigma_x, sigma_y, sigma_z = pauli_matrices()
        self.assertAlmostEqual(KET_0.projector().expectation(sigma_z).real, 1.0, places=12)
        self.assertAlmostEqual(KET_1.projector().expectation(sigma_z).real, -1.0, places=12)
        self.assertAlmostEqual(np.trace(identity(2).entries).real, 4.0, places=12)


class TensorTestCase(unittest.TestCase):

    def test_order(self):
        npt.assert_allclose(tensor(KET_0, KET_1).amplitudes, [0, 1, 0, 0])
        npt.assert_allclose(tensor(KET_1, KET_0, KET_0).amplitudes, np.eye(8)[4])

    def test_kind_mismatch(self):
        with self.assertRaises(JMNetKindMismatchError):
            tensor(KET_0, KET_0.projector())

    def test_partial_trace_of_product(self):
        rho = tensor(KET_0.projector(), KET_1.projector())
        self.assertTrue(partial_trace(rho, FIRST).is_close(KET_0.projector()))
        self.assertTrue(partial_trace(rho, SECOND).is_close(KET_1.projector()))

    def test_partial_trace_of_singlet(self):
        reduced = partial_trace(singlet().projector(), FIRST)
        self.assertTrue(reduced.is_close(np.eye(2) / 2))
        with self.assertRaises(JMNetUsageError):
            partial_trace(singlet().projector(), [2])

    def test_partial_trace_keeps_order(self):
        rho = tensor(KET_0.projector(), KET_1.projector(), Ket([1, 1], normalize=True).projector())
        kept = partial_trace(rho, [0, 2])
        expected = tensor(KET_0.projector(), Ket([1, 1], normalize=True).projector())
        self.assertTrue(kept.is_close(expected))

    def test_permute_qubits(self):
        swapped = permute_qubits(tensor(KET_0, KET_1), [1, 0])
        npt.assert_allclose(swapped.amplitudes, tensor(KET_1, KET_0).amplitudes)
        rho = tensor(KET_0.projector(), KET_1.projector(), KET_1.projector())
        moved = permute_qubits(rho, [2, 0, 1])
        self.assertTrue(moved.is_close(tensor(KET_1.projector(), KET_0.projector(), KET_1.projector())))
        with self.assertRaises(JMNetUsageError):
            permute_qubits(rho, [0, 0, 1])


class BlochTestCase(unittest.TestCase):

    def test_cylindrical(self):
        m = BlochVector.from_cylindrical(0.5, math.pi / 3)
        self.assertAlmostEqual(m.norm, 1.0, places=12)
        self.assertAlmostEqual(m.eta, 0.5, places=12)
        self.assertAlmostEqual(m.phi, math.pi / 3, places=12)
        with self.assertRaises(JMNetRangeError):
            BlochVector.from_cylindrical(1.5, 0)

    def test_ket_round_trip(self):
        for m in [(0, 0, 1), (0, 0, -1), (1, 0, 0), (0, 1, 0), (1 / math.sqrt(3),) * 3]:
            ket = ket_from_bloch(m)
            self.assertTrue(bloch_vector(ket.projector()).is_close(BlochVector(*m)))

    def test_antipodal(self):
        for convention in ("invariant_first", "paper_literal"):
            m = BlochVector(1, -1, -1).scaled(1 / math.sqrt(3))
            overlap = ket_from_bloch(m, convention).inner(antipodal_ket(m, convention))
            self.assertAlmostEqual(abs(overlap), 0.0, places=12)

    def test_literal_formula_flips_y_and_z(self):
        m = BlochVector.from_cylindrical(0.3, 1.1)
        literal = bloch_vector(paper_literal_ket(m.eta, m.phi).projector())
        self.assertTrue(literal.is_close(BlochVector(m.x, -m.y, -m.z)))

    def test_not_unit(self):
        with self.assertRaises(JMNetValidationError):
            ket_from_bloch((0.5, 0, 0))

    def test_singlet_correlations(self):
        npt.assert_allclose(correlation_tensor(singlet().projector()), -np.eye(3), atol=1e-12)


class WernerTestCase(unittest.TestCase):

    def test_limits(self):
        self.assertTrue(werner_state(1).is_close(singlet().projector()))
        self.assertTrue(werner_state(0).is_close(np.eye(4) / 4))
        with self.assertRaises(JMNetRangeError):
            werner_state(1.01)

    def test_correlations_scale(self):
        for W in (0.0, 0.3, 0.9):
            npt.assert_allclose(correlation_tensor(werner_state(W)), -W * np.eye(3), atol=1e-12)

    def test_born_probabilities(self):
        basis = [tensor(a, b) for a in (KET_0, KET_1) for b in (KET_0, KET_1)]
        npt.assert_allclose(born_probabilities(singlet().projector(), basis), [0, 0.5, 0.5, 0], atol=1e-12)
        with self.assertRaises(JMNetValidationError):
            born_probabilities(singlet().projector(), basis[:3])


def _random_density(rng, n_qubits=1):
    dim = 2 ** n_qubits
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return Operator(rho / np.trace(rho).real, density=True)


def _random_operator(rng, dim=2):
    return Operator(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))


class RandomizedPropertiesTestCase(unittest.TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(20)

    def test_tensor_associative(self):
        for _ in range(10):
            a, b, c = (_random_operator(self.rng) for _ in range(3))
            left = tensor(tensor(a, b), c)
            self.assertTrue(left.is_close(tensor(a, tensor(b, c)), 1e-12))
            self.assertTrue(left.is_close(tensor(a, b, c), 1e-12))

    def test_tensor_bilinear(self):
        for _ in range(10):
            a, b, c = (_random_operator(self.rng) for _ in range(3))
            x, y = self.rng.normal(size=2) + 1j * self.rng.normal(size=2)
            mixed = Operator(x * a.entries + y * b.entries)
            expected = x * tensor(a, c).entries + y * tensor(b, c).entries
            self.assertTrue(tensor(mixed, c).is_close(expected, 1e-12))
            expected = x * tensor(c, a).entries + y * tensor(c, b).entries
            self.assertTrue(tensor(c, mixed).is_close(expected, 1e-12))

    def test_partial_trace_of_random_products(self):
        for _ in range(10):
            rho_a, rho_b = _random_density(self.rng), _random_density(self.rng, 2)
            product = tensor(rho_a, rho_b)
            self.assertTrue(partial_trace(product, [0]).is_close(rho_a, 1e-12))
            self.assertTrue(partial_trace(product, [1, 2]).is_close(rho_b, 1e-12))

    def test_bloch_round_trip(self):
        for _ in range(50):
            m = self.rng.normal(size=3)
            m /= np.linalg.norm(m)
            npt.assert_allclose(bloch_vector(ket_from_bloch(m).projector()).as_array(), m, atol=1e-10)
            literal = bloch_vector(ket_from_bloch(m, "paper_literal").projector())
            npt.assert_allclose(literal.as_array(), m * [1, -1, -1], atol=1e-10)


class WernerBellTestCase(unittest.TestCase):

    def test_bell_diagonal(self):
        basis = bell_basis()
        for W in (0.0, 0.3, 0.5, 1.0):
            expected = [(1 - W) / 4] * 3 + [(1 + 3 * W) / 4]
            npt.assert_allclose(born_probabilities(werner_state(W), basis), expected, atol=1e-12)

    def test_eigenvalues(self):
        npt.assert_allclose(sorted(werner_state(0.5).eigenvalues().real), [0.125, 0.125, 0.125, 0.625], atol=1e-12)

    def test_singlet_outcomes(self):
        npt.assert_allclose(born_probabilities(singlet().projector(), bell_basis()), [0, 0, 0, 1], atol=1e-12)
        for convention in ("invariant_first", "paper_literal"):
            npt.assert_allclose(born_probabilities(singlet().projector(), ejm_basis(convention)), [0.25] * 4,
                                atol=1e-12)


if __name__ == '__main__':
    unittest.main()
