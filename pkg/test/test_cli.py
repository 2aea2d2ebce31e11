from unittest import TestCase
import json
import os
import tempfile

from pylevymlmc.cli import main, LEVELS_HEADER

package_directory = os.path.dirname(os.path.abspath(__file__))


def stable_document(**schedule):
    with open(os.path.join(package_directory, "..", "configs", "stable_1_5.json"), 'r', encoding='utf-8') as f:
        document = json.load(f)
    document["schedule"] = schedule or {"mode": "case1", "tau": 256}
    return document


class TestCommandLine(TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write_config(self, document, name="config.json"):
        path = os.path.join(self.tmp.name, name)
        with open(path, 'w', encoding='utf-8') as f:
            if isinstance(document, str):
                f.write(document)
            else:
                json.dump(document, f)
        return path

    def run_cli(self, *args):
        out = os.path.join(self.tmp.name, "out.txt")
        if os.path.exists(out):
            os.remove(out)
        code = main(list(args) + ["--out", out])
        text = None
        if os.path.exists(out):
            with open(out, 'r', encoding='utf-8') as f:
                text = f.read()
        return code, text

    def test_estimate(self):
        config = self.write_config(stable_document())
        code, text = self.run_cli("estimate", "--config", config)
        self.assertEqual(code, 0)
        result = json.loads(text)
        self.assertEqual(set(result), {"estimate", "stderr", "cost", "levels"})
        self.assertEqual(len(result["levels"]), 6)
        self.assertEqual(set(result["levels"][0]), {"k", "n", "mean", "var", "eps", "h", "envelope",
                                                    "breakpoints"})

    def test_workers_and_seed(self):
        config = self.write_config(stable_document())
        _, one = self.run_cli("estimate", "--config", config, "--workers", "1")
        _, many = self.run_cli("estimate", "--config", config, "--workers", "3")
        self.assertEqual(one, many)
        _, other = self.run_cli("estimate", "--config", config, "--seed", "99")
        self.assertNotEqual(json.loads(one)["estimate"], json.loads(other)["estimate"])

    def test_levels(self):
        config = self.write_config(stable_document())
        code, text = self.run_cli("levels", "--config", config, "--n-probe", "100")
        self.assertEqual(code, 0)
        lines = text.splitlines()
        self.assertEqual(lines[0], ",".join(LEVELS_HEADER))
        self.assertEqual(len(lines), 1 + 6 + 2)
        self.assertTrue(lines[-2].startswith("# bias_proxy = "))
        self.assertTrue(lines[-1].startswith("# variance_proxy = "))

    def test_rates(self):
        document = stable_document()
        document["sweep"] = {"tau_list": [128, 256], "repetitions": 2}
        config = self.write_config(document)
        code, text = self.run_cli("rates", "--config", config, "--compare-correction")
        self.assertEqual(code, 0)
        lines = text.splitlines()
        self.assertEqual(lines[0], "tau,cost,abs_error,stderr,repetitions")
        self.assertTrue(lines[1].startswith("128.0,"))
        self.assertTrue(lines[-1].startswith("# correction_advantage tau = 256"))

    def test_rates_orders(self):
        code, text = self.run_cli("rates", "--config", self.write_config(stable_document()), "--orders")
        self.assertEqual(code, 0)
        lines = text.splitlines()
        self.assertEqual(lines[0], "beta,plain,corrected,corrected_gaussian")
        self.assertEqual(len(lines), 43)
        self.assertEqual(lines[-1], "# model_bg_index = 1.5")

    def test_verify(self):
        config = self.write_config(stable_document())
        code, text = self.run_cli("verify", "--config", config)
        self.assertEqual(code, 0, msg=text)
        self.assertTrue(all(line.startswith("PASS ") for line in text.splitlines()))

    def test_verify_fails(self):
        document = stable_document(mode="manual", eps=[2., 1.], h=[0.5, 0.25], n=[5, 5])
        code, text = self.run_cli("verify", "--config", self.write_config(document))
        self.assertEqual(code, 1)
        self.assertIn("FAIL cost_preconditions", text)

    def test_configuration_errors(self):
        self.assertEqual(self.run_cli("estimate", "--config", self.write_config("{\"model\": "))[0], 2)
        self.assertEqual(self.run_cli("estimate", "--config", os.path.join(self.tmp.name, "none.json"))[0], 2)
        document = stable_document()
        document["schedule"]["C3"] = 1.
        self.assertEqual(self.run_cli("estimate", "--config", self.write_config(document))[0], 2)
        document = stable_document()
        document["sweep"] = {"tau_list": [128], "repetitions": "twenty"}
        self.assertEqual(self.run_cli("rates", "--config", self.write_config(document))[0], 2)

    def test_runtime_error(self):
        config = self.write_config(stable_document(mode="case1", tau=3))
        code, text = self.run_cli("estimate", "--config", config)
        self.assertEqual(code, 3)
        self.assertIsNone(text)

    def test_usage(self):
        with self.assertRaises(SystemExit):
            main(["estimate"])
