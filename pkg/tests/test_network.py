import itertools
import json
import os
import sys
import tempfile
import unittest
from fractions import Fraction
import numpy as np
import numpy.testing as npt
sys.path.append(os.path.join(os.path.dirname(os.path.abspath(__file__)), ".."))
from jmnet.quantum import Ket
from jmnet.measurements import bell_basis, ejm_basis, JointBasis
from jmnet.network import (CorrelationTable, NetworkScenario, triangle_correlation, triangle_stats, cell_classes,
                           bsm_triangle_reference, chain_correlation, swapped_state, conditional_visibility,
                           group_outcomes, condition_on, SETTINGS_PRESETS)
from jmnet.exceptions import (JMNetValidationError, JMNetUsageError, JMNetWiringError, JMNetConfigurationError,
                              JMNetRangeError)


class CorrelationTableTestCase(unittest.TestCase):

    def test_validation(self):
        with self.assertRaises(JMNetValidationError):
            CorrelationTable(np.full((2, 2), 0.3))
        with self.assertRaises(JMNetValidationError):
            CorrelationTable([[1.1, -0.1], [0, 0]])
        with self.assertRaises(JMNetValidationError):
            CorrelationTable(np.full((2, 2, 3), 0.25), (2, 2), (3, 1))

    def test_inputs(self):
        p = np.zeros((2, 2, 2, 2))
        for x, y in itertools.product(range(2), repeat=2):
            p[x ^ y, 0, x, y] = 0.5
            p[x ^ y, 1, x, y] = 0.5
        table = CorrelationTable(p, (2, 2), (2, 2))
        self.assertTrue(table.has_inputs)
        npt.assert_allclose(table.conditional((1, 0)), [[0, 0], [0.5, 0.5]])
        with self.assertRaises(JMNetUsageError):
            table.joint()

    def test_marginal_and_grouping(self):
        table = triangle_correlation(ejm_basis())
        npt.assert_allclose(table.marginal([0]).joint(), [0.25] * 4, atol=1e-12)
        grouped = group_outcomes(table, [[0, 1], [2, 3]])
        self.assertEqual(grouped.outcome_alphabets, (2, 2, 2))
        with self.assertRaises(JMNetUsageError):
            table.group_outcomes([[0, 1], [1, 2, 3]])

    def test_condition_on(self):
        table = triangle_correlation(ejm_basis())
        conditioned = condition_on(table, 2, 0)
        self.assertEqual(conditioned.party_names, ("A", "B"))
        self.assertAlmostEqual(conditioned.joint()[0, 0], 25 / 64, places=12)

    def test_json_round_trip(self):
        table = triangle_correlation(bell_basis())
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, "table.json")
            with open(path, "w", encoding="utf-8") as file:
                json.dump(table.to_dict(), file)
            self.assertTrue(CorrelationTable.from_json(path).allclose(table, 0.0))

    def test_csv_rows(self):
        rows = list(CorrelationTable(np.full((2, 2), 0.25), party_names=("A", "C")).csv_rows())
        self.assertEqual(rows[0], [1, 1, 0.25])
        self.assertEqual(len(rows), 4)


class TriangleTestCase(unittest.TestCase):

    def setUp(self):
        self.table = triangle_correlation(ejm_basis())

    def test_cell_classes(self):
        classes = cell_classes(self.table)
        self.assertEqual([len(classes[name]) for name in ("all_equal", "two_equal", "all_distinct")], [4, 36, 24])
        npt.assert_allclose(classes["all_equal"], 25 / 256, atol=1e-12)
        npt.assert_allclose(classes["two_equal"], 1 / 256, atol=1e-12)
        npt.assert_allclose(classes["all_distinct"], 5 / 256, atol=1e-12)
        total = 4 * Fraction(25, 256) + 36 * Fraction(1, 256) + 24 * Fraction(5, 256)
        self.assertEqual(total, 1)

    def test_stats(self):
        stats = triangle_stats(self.table)
        npt.assert_allclose(stats.marginals["A"], [0.25] * 4, atol=1e-12)
        npt.assert_allclose(stats.p_pair_equal_k["AB"], [7 / 64] * 4, atol=1e-12)
        self.assertAlmostEqual(stats.p_ab_equal, 7 / 16, places=12)
        npt.assert_allclose(stats.p_conditional_triple, [25 / 28] * 4, atol=1e-12)
        self.assertAlmostEqual(stats.p_all_equal, 25 / 64, places=12)
        self.assertAlmostEqual(stats.p_all_distinct, 24 * 5 / 256, places=12)

    def test_paper_literal_convention_gives_same_table(self):
        literal = triangle_correlation(ejm_basis("paper_literal"))
        npt.assert_allclose(sorted(literal.joint().ravel()), sorted(self.table.joint().ravel()), atol=1e-12)

    def test_cyclic_symmetry(self):
        p = self.table.joint()
        npt.assert_allclose(p, p.transpose(1, 2, 0), atol=1e-10)

    def test_tetrahedral_symmetry(self):
        p = self.table.joint()
        for perm in ((1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0)):
            npt.assert_allclose(p[np.ix_(perm, perm, perm)], p, atol=1e-10)

    def test_uniform_without_visibility(self):
        table = triangle_correlation(ejm_basis(), (0, 0, 0))
        npt.assert_allclose(table.joint(), 1 / 64, atol=1e-12)
        stats = triangle_stats(table)
        self.assertAlmostEqual(stats.p_all_equal, 1 / 16, places=12)
        self.assertAlmostEqual(stats.p_ab_equal, 1 / 4, places=12)

    def test_affine_in_each_visibility(self):
        basis = ejm_basis()
        for axis in range(3):
            tables = []
            for w in (0.2, 0.5, 0.8):
                W = [0.7, 0.7, 0.7]
                W[axis] = w
                tables.append(triangle_correlation(basis, W).joint())
            npt.assert_allclose(tables[1] - tables[0], tables[2] - tables[1], atol=1e-12)

    def test_bsm_reference(self):
        p = bsm_triangle_reference().joint()
        for a, b, c in itertools.product(range(4), repeat=3):
            psi_odd = ((a >> 1) + (b >> 1) + (c >> 1)) % 2 == 1
            minus_odd = ((a & 1) + (b & 1) + (c & 1)) % 2 == 1
            self.assertAlmostEqual(p[a, b, c], 1 / 16 if psi_odd and minus_odd else 0.0, places=12)
        npt.assert_allclose(triangle_stats(p).marginals["B"], [0.25] * 4, atol=1e-12)

    def test_grouped_table(self):
        grouped = self.table.group_outcomes([[0, 1], [2, 3]]).joint()
        for cell in itertools.product(range(2), repeat=3):
            expected = 7 / 32 if len(set(cell)) == 1 else 3 / 32
            self.assertAlmostEqual(grouped[cell], expected, places=12)

    def test_errors(self):
        computational = JointBasis.custom([Ket(row) for row in np.eye(4)])
        with self.assertRaises(JMNetRangeError):
            triangle_correlation(computational, (1.2, 1, 1))
        with self.assertRaises(JMNetConfigurationError):
            triangle_correlation(computational, (1, 1))
        with self.assertRaises(JMNetWiringError):
            triangle_correlation([Ket([1, 0]), Ket([0, 1])])
        with self.assertRaises(JMNetUsageError):
            triangle_stats(np.full((2, 2), 0.25))


class ChainTestCase(unittest.TestCase):

    def test_shape(self):
        table = chain_correlation(3, (1, 1, 1), SETTINGS_PRESETS["chsh"])
        self.assertEqual(table.outcome_alphabets, (2, 4, 4, 2))
        self.assertEqual(table.input_alphabets, (2, 1, 1, 2))
        self.assertEqual(table.party_names, ("A", "B1", "B2", "C"))

    def test_middle_outcomes_uniform(self):
        table = chain_correlation(2, (0.6, 0.9), SETTINGS_PRESETS["chsh"])
        for inputs in table.input_combinations():
            npt.assert_allclose(table.conditional(inputs).sum(axis=(0, 2)), [0.25] * 4, atol=1e-12)

    def test_depolarized_link(self):
        table = chain_correlation(2, (0, 1), SETTINGS_PRESETS["bilocal"])
        for b in range(4):
            conditioned = table.condition_on(1, b)
            for inputs in conditioned.input_combinations():
                npt.assert_allclose(conditioned.conditional(inputs), 0.25, atol=1e-12)

    def test_errors(self):
        with self.assertRaises(JMNetConfigurationError):
            chain_correlation(1, (1,), SETTINGS_PRESETS["chsh"])
        with self.assertRaises(JMNetConfigurationError):
            chain_correlation(2, (1, 1, 1), SETTINGS_PRESETS["chsh"])
        with self.assertRaises(JMNetConfigurationError):
            chain_correlation(2, (1, 1), ([], SETTINGS_PRESETS["chsh"][1]))


class SwappingTestCase(unittest.TestCase):

    def test_singlet_after_psi_minus(self):
        state = swapped_state(1, 1, 3)
        self.assertTrue(state.is_close(bell_basis().kets[3].projector(), 1e-12))

    def test_visibility_product(self):
        basis = bell_basis()
        for W1, W2 in ((1, 1), (0.5, 0.8), (0.9, 0.3)):
            for b in range(4):
                state = swapped_state(W1, W2, b)
                self.assertAlmostEqual(conditional_visibility(state, basis.kets[b]), W1 * W2, places=12)
                expected = W1 * W2 * basis.kets[b].projector().entries + (1 - W1 * W2) * np.eye(4) / 4
                self.assertTrue(state.is_close(expected, 1e-12))


class ScenarioTestCase(unittest.TestCase):

    def test_triangle_wiring(self):
        scenario = NetworkScenario("triangle", [1, 1, 1])
        self.assertEqual([party.qubits for party in scenario.parties], [(3, 4), (5, 0), (1, 2)])
        self.assertTrue(scenario.evaluate().allclose(triangle_correlation(ejm_basis())))

    def test_chain_wiring(self):
        scenario = NetworkScenario("chain", [1, 0.5], measurement="bsm")
        self.assertEqual([party.qubits for party in scenario.parties], [(0,), (1, 2), (3,)])
        self.assertEqual([party.inputs for party in scenario.parties], [2, 1, 2])

    def test_json(self):
        data = {"topology": "chain", "n_sources": 2, "visibilities": [1, 1], "measurement": "bsm",
                "convention": "invariant_first", "end_settings": [[[0, 0, 1], [1, 0, 0]], [[0, 0, 1]]]}
        scenario = NetworkScenario.from_dict(data)
        self.assertEqual(scenario.evaluate().input_alphabets, (2, 1, 1))
        again = NetworkScenario.from_dict(json.loads(json.dumps(scenario.to_dict())))
        self.assertTrue(again.evaluate().allclose(scenario.evaluate()))

    def test_errors(self):
        with self.assertRaises(JMNetConfigurationError):
            NetworkScenario("star", [1, 1, 1])
        with self.assertRaises(JMNetConfigurationError):
            NetworkScenario("triangle", [1, 1])
        with self.assertRaises(JMNetConfigurationError):
            NetworkScenario("triangle", [1, 1, 1], end_settings=SETTINGS_PRESETS["chsh"])
        with self.assertRaises(JMNetConfigurationError):
            NetworkScenario.from_dict({"topology": "triangle"})


if __name__ == '__main__':
    unittest.main()
