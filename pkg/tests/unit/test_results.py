import io
import os
import tempfile
import unittest

from fq.decomp import results
from fq.decomp.results import CSV_COLUMNS, record


class TestRecords(unittest.TestCase):
    def test_ratio(self):
        self.assertEqual(record("s", "i", 3, 4).ratio, 0.75)
        self.assertIsNone(record("s", "i", 3, 0).ratio)
        self.assertIsNone(record("s", "i", 3, None).ratio)

    def test_report_only_records_pass(self):
        r = record("s", "i", 10, 1)
        self.assertTrue(r.passed)
        self.assertFalse(r.hard)
        self.assertEqual(results.failures([r]), [])

    def test_failures_are_hard_and_failed(self):
        bad = record("s", "bad", 2, 1, passed=False, hard=True)
        good = record("s", "good", 1, 2, passed=True, hard=True)
        self.assertEqual(results.failures([good, bad]), [bad])

    def test_format_float(self):
        self.assertEqual(results.format_float(None), "")
        self.assertEqual(results.format_float(float("inf")), "inf")
        self.assertEqual(results.format_float(float("-inf")), "-inf")
        self.assertEqual(results.format_float(1 / 3), "0.333333333333")
        self.assertEqual(results.format_float(44.0), "44")


class TestCsv(unittest.TestCase):
    def setUp(self):
        self.records = [
            record("b-suite", "x", 1.0, 2.0),
            record("a-suite", "z", 5.0, 4.0, passed=False, hard=True),
            record("a-suite", "y", 2 / 3, None),
        ]

    def _csv(self, records, timing=False):
        out = io.StringIO()
        results.emit_csv(records, out, timing=timing)
        return out.getvalue()

    def test_empty_run_writes_the_header(self):
        self.assertEqual(self._csv([]), ",".join(CSV_COLUMNS) + "\n")

    def test_rows_are_sorted(self):
        lines = self._csv(self.records).splitlines()
        self.assertEqual(lines[0], "suite,instance,lhs,rhs,ratio,pass,runtime_ms")
        self.assertEqual(lines[1], "a-suite,y,0.666666666667,,,true,")
        self.assertEqual(lines[2], "a-suite,z,5,4,1.25,false,")
        self.assertEqual(lines[3], "b-suite,x,1,2,0.5,true,")

    def test_runtime_only_with_timing(self):
        timed = [results.VerificationRecord("s", "i", 1.0, 1.0, 1.0, True, runtime_ms=2.5)]
        self.assertTrue(self._csv(timed).splitlines()[1].endswith(",true,"))
        self.assertTrue(self._csv(timed, timing=True).splitlines()[1].endswith(",true,2.5"))

    def test_identical_records_give_identical_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            first, second = os.path.join(tmp, "one.csv"), os.path.join(tmp, "two.csv")
            results.emit_csv(self.records, first)
            results.emit_csv(list(reversed(self.records)), second)
            with open(first, "rb") as fh1, open(second, "rb") as fh2:
                self.assertEqual(fh1.read(), fh2.read())


class TestSummary(unittest.TestCase):
    def test_summarize_counts_per_suite(self):
        records = [
            record("alpha", "1", 1.0, 2.0),
            record("alpha", "2", 3.0, 2.0, passed=False, hard=True),
            record("beta", "1", 1.0, None),
        ]
        table = results.summarize(records)
        self.assertEqual([row["suite"] for row in table.rows], ["alpha", "beta"])
        alpha, beta = table.rows
        self.assertEqual(alpha["records"], 2)
        self.assertEqual(alpha["hard_failures"], 1)
        self.assertEqual(alpha["max_ratio"], 1.5)
        self.assertEqual(beta["hard_failures"], 0)
        self.assertIsNone(beta["max_ratio"])

    def test_print_summary(self):
        out = io.StringIO()
        results.print_summary([record("alpha", "1", 1.0, 2.0)], out)
        self.assertIn("alpha", out.getvalue())
        self.assertIn("hard_failures", out.getvalue())
