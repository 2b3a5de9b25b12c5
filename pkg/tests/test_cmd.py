import contextlib
import io
import json
import os
import sys
import tempfile
import unittest
sys.path.append(os.path.join(os.path.dirname(os.path.abspath(__file__)), ".."))
from jmnet._cmd import main
from jmnet.local_models import LocalModel


def run(*argv):
    """Runs the command line and returns ``(exit code, stdout)``."""
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = main(list(argv))
    return code, out.getvalue()


class ValidateEJMTestCase(unittest.TestCase):

    def test_passes(self):
        for convention in ("invariant_first", "paper_literal"):
            code, text = run("validate-ejm", "--convention", convention)
            self.assertEqual(code, 0)
            report = json.loads(text)
            self.assertTrue(report["passed"])
            self.assertEqual(report["command"], "validate-ejm")

    def test_unknown_convention(self):
        with contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as context:
                run("validate-ejm", "--convention", "other")
        self.assertEqual(context.exception.code, 2)


class TriangleTestCase(unittest.TestCase):

    def test_ejm_checks(self):
        code, text = run("triangle")
        self.assertEqual(code, 0)
        report = json.loads(text)
        self.assertEqual(len(report["checks"]), 7)
        self.assertAlmostEqual(report["results"]["stats"]["p_all_equal"], 25 / 64, places=12)

    def test_csv(self):
        code, text = run("triangle", "--measurement", "bsm", "--format", "csv")
        self.assertEqual(code, 0)
        lines = text.strip().split("\n")
        self.assertEqual(lines[0], "a,b,c,p")
        self.assertEqual(len(lines), 65)

    def test_bad_visibilities(self):
        self.assertEqual(run("triangle", "--w", "1,1")[0], 2)
        self.assertEqual(run("triangle", "--w", "1,1.5,1")[0], 2)

    def test_options_before_subcommand(self):
        code, text = run("--format", "csv", "triangle", "--measurement", "bsm")
        self.assertEqual(code, 0)
        self.assertEqual(text.split("\n")[0], "a,b,c,p")
        code, text = run("--format", "csv", "triangle", "--format", "json")
        self.assertEqual(json.loads(text)["command"], "triangle")


class ChainTestCase(unittest.TestCase):

    def test_bilocal(self):
        code, text = run("chain", "--w", "0.8,0.8")
        self.assertEqual(code, 0)
        report = json.loads(text)
        self.assertTrue(report["results"]["violated"])
        self.assertFalse(report["results"]["thresholds"]["chsh_violated"])

    def test_chsh(self):
        code, text = run("chain", "--inequality", "chsh", "--n", "3")
        self.assertEqual(code, 0)
        self.assertEqual(len(json.loads(text)["checks"]), 16)


class ModelsTestCase(unittest.TestCase):

    def test_q_model(self):
        code, text = run("models", "q-model", "--q", "0.5")
        self.assertEqual(code, 0)
        self.assertAlmostEqual(json.loads(text)["results"]["p_all_equal"]["0.5"], 61 / 256, places=12)

    def test_q_model_grid(self):
        code, text = run("models", "q-model")
        self.assertEqual(code, 0)
        self.assertEqual(len(json.loads(text)["results"]["p_all_equal"]), 11)

    def test_asymmetric(self):
        code, text = run("models", "asymmetric")
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(text)["results"]["all_distinct_zeros"], 20)

    def test_fit(self):
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, "model.json")
            code, text = run("models", "fit", "--target", "ejm-triangle", "--restarts", "2", "--max-cardinality",
                             "2", "--max-iterations", "20", "--seed", "3", "--model-out", path)
            self.assertTrue(os.path.exists(path))
        self.assertEqual(code, 0)
        report = json.loads(text)
        self.assertEqual(report["inputs"]["config"]["seed"], 3)
        self.assertEqual(len(report["results"]["trace"]), 2)
        self.assertEqual(report["checks"], [])

    def test_fit_config_file(self):
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, "fit.json")
            with open(path, "w", encoding="utf-8") as file:
                json.dump({"restarts": 1, "max_cardinality": 2, "max_iterations": 5, "colour": 1}, file)
            self.assertEqual(run("models", "fit", "--config", path)[0], 2)

    def test_fit_writes_model_next_to_report(self):
        with tempfile.TemporaryDirectory() as folder:
            out = os.path.join(folder, "fit.json")
            code, _ = run("--seed", "5", "models", "fit", "--target", "ejm-triangle", "--restarts", "1",
                          "--max-cardinality", "2", "--max-iterations", "10", "--out", out)
            self.assertEqual(code, 0)
            model = LocalModel.from_json(os.path.join(folder, "fit.model.json"))
            with open(out, "r", encoding="utf-8") as file:
                report = json.load(file)
        self.assertEqual(model.alphabets, (2, 2, 2))
        self.assertEqual(report["results"]["model_file"], "fit.model.json")
        self.assertEqual(report["inputs"]["config"]["seed"], 5)


class ScenarioTestCase(unittest.TestCase):

    def setUp(self):
        self.folder = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.folder.name, "scenario.json")
        with open(self.path, "w", encoding="utf-8") as file:
            json.dump({"topology": "triangle", "visibilities": [1, 0.5, 1], "measurement": "ejm"}, file)

    def tearDown(self):
        self.folder.cleanup()

    def test_reproducible(self):
        first, second = run("scenario", self.path), run("scenario", self.path)
        self.assertEqual(first[0], 0)
        self.assertEqual(first[1], second[1])
        self.assertIn("stats", json.loads(first[1])["results"])

    def test_out(self):
        out = os.path.join(self.folder.name, "report.json")
        code, text = run("scenario", self.path, "--out", out)
        self.assertEqual((code, text), (0, ""))
        with open(out, "r", encoding="utf-8") as file:
            self.assertEqual(json.load(file)["command"], "scenario")

    def test_missing_file(self):
        self.assertEqual(run("scenario", os.path.join(self.folder.name, "missing.json"))[0], 2)


if __name__ == '__main__':
    unittest.main()
