import json
import os
import sys
import tempfile
import unittest
from fractions import Fraction
import numpy as np
import numpy.testing as npt
sys.path.append(os.path.join(os.path.dirname(os.path.abspath(__file__)), ".."))
from jmnet.measurements import ejm_basis
from jmnet.network import triangle_correlation, triangle_stats, cell_classes, bsm_triangle_reference
from jmnet.local_models import (LocalModel, evaluate_model, symmetric_q_model, q_model_abc_rate, q_model_table_rows,
                                q_model_optimum, asymmetric_model, bsm_triangle_model, grouped_ejm_model)
from jmnet.exceptions import JMNetConfigurationError, JMNetValidationError, JMNetRangeError, JMNetUsageError

Q_GRID = [k / 10 for k in range(11)]


def _constant_model(outcome):
    table = np.zeros((2, 2, 4))
    table[:, :, outcome] = 1
    return LocalModel([[0.3, 0.7], [0.5, 0.5], [1, 0]], {name: table for name in "ABC"})


class LocalModelTestCase(unittest.TestCase):

    def test_constant_responses(self):
        p = evaluate_model(_constant_model(2)).joint()
        self.assertAlmostEqual(p[2, 2, 2], 1.0, places=15)
        self.assertAlmostEqual(p.sum(), 1.0, places=15)

    def test_uniform_responses(self):
        model = LocalModel([np.full(3, 1 / 3)] * 3, {name: np.full((3, 3, 4), 0.25) for name in "ABC"})
        npt.assert_allclose(evaluate_model(model).joint(), 1 / 64, atol=1e-15)

    def test_validation(self):
        with self.assertRaises(JMNetValidationError):
            LocalModel([[0.5, 0.6], [0.5, 0.5], [0.5, 0.5]], {name: np.full((2, 2, 4), 0.25) for name in "ABC"})
        with self.assertRaises(JMNetConfigurationError):
            LocalModel([[0.5, 0.5], [1.0], [0.5, 0.5]], {name: np.full((2, 2, 4), 0.25) for name in "ABC"})
        with self.assertRaises(JMNetConfigurationError):
            LocalModel([[1.0]] * 3, {"A": np.ones((1, 1, 1)), "B": np.ones((1, 1, 1))})

    def test_relabel_invariance(self):
        model = symmetric_q_model(0.3)
        permutation = [3, 5, 0, 1, 7, 2, 6, 4]
        for source in range(3):
            relabeled = model.relabel(source, permutation)
            self.assertTrue(evaluate_model(relabeled).allclose(evaluate_model(model), 1e-15))
        with self.assertRaises(JMNetUsageError):
            model.relabel(0, [0, 1])

    def test_json_round_trip(self):
        model = asymmetric_model()
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, "model.json")
            model.to_json(path)
            with open(path, "r", encoding="utf-8") as file:
                self.assertEqual(sorted(json.load(file)), ["alphabets", "responses", "sources"])
            loaded = LocalModel.from_json(path)
        self.assertTrue(evaluate_model(loaded).allclose(evaluate_model(model), 0.0))
        with self.assertRaises(JMNetConfigurationError):
            LocalModel.from_dict({"sources": [[1.0]] * 3})


class QModelTestCase(unittest.TestCase):

    def test_closed_form(self):
        for q in Q_GRID:
            enumerated = triangle_stats(evaluate_model(symmetric_q_model(q))).p_all_equal
            self.assertLess(abs(q_model_abc_rate(q) - enumerated), 1e-12)

    def test_maximum(self):
        self.assertAlmostEqual(q_model_abc_rate(0.5), 61 / 256, places=15)
        self.assertAlmostEqual(q_model_abc_rate(0.0), 13 / 64, places=15)
        q, rate = q_model_optimum()
        self.assertAlmostEqual(q, 0.5, places=6)
        self.assertAlmostEqual(rate, 61 / 256, places=12)

    def test_rows(self):
        expected = {(0, 0, 0): (Fraction(7, 16), Fraction(13, 64)), (0, 0, 1): (1, Fraction(1, 4)),
                    (0, 1, 0): (Fraction(1, 4), Fraction(1, 4)), (0, 1, 1): (Fraction(5, 8), Fraction(1, 4)),
                    (1, 0, 0): (Fraction(1, 4), Fraction(1, 4)), (1, 0, 1): (Fraction(5, 8), Fraction(1, 4)),
                    (1, 1, 0): (Fraction(1, 4), Fraction(1, 4)), (1, 1, 1): (Fraction(7, 16), Fraction(13, 64))}
        rows = q_model_table_rows(0.3)
        self.assertEqual([row.bits for row in rows], sorted(expected))
        for row in rows:
            p_ab, p_abc = expected[row.bits]
            self.assertLess(abs(row.p_ab_equal - p_ab), 1e-12)
            self.assertLess(abs(row.p_all_equal - p_abc), 1e-12)
        self.assertAlmostEqual(sum(row.weight for row in rows), 1.0, places=15)
        average = sum(row.weight * row.p_all_equal for row in rows)
        self.assertAlmostEqual(average, q_model_abc_rate(0.3), places=12)

    def test_range(self):
        with self.assertRaises(JMNetRangeError):
            symmetric_q_model(1.5)
        with self.assertRaises(JMNetRangeError):
            q_model_abc_rate(-0.1)


class ExplicitModelsTestCase(unittest.TestCase):

    def test_asymmetric(self):
        table = evaluate_model(asymmetric_model())
        stats = triangle_stats(table)
        self.assertAlmostEqual(stats.p_all_equal, 0.5, places=15)
        self.assertAlmostEqual(stats.p_ab_equal, 0.5, places=15)
        distinct = cell_classes(table)["all_distinct"]
        self.assertEqual(sum(1 for value in distinct if value == 0), 20)

    def test_bsm_triangle(self):
        self.assertTrue(evaluate_model(bsm_triangle_model()).allclose(bsm_triangle_reference(), 1e-12))

    def test_grouped_ejm(self):
        grouped = triangle_correlation(ejm_basis()).group_outcomes([[0, 1], [2, 3]])
        self.assertTrue(evaluate_model(grouped_ejm_model()).allclose(grouped, 1e-12))


if __name__ == '__main__':
    unittest.main()
