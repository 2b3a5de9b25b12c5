"""
A module that collects the results and numerical checks of a command and writes them as
JSON or CSV.
"""
import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List
from jmnet._helpers import to_builtin
from jmnet.network import CorrelationTable
from jmnet.exceptions import JMNetUsageError

FORMATS = ("json", "csv")


@dataclass
class Check:
    """
    A numerical comparison. ``passed`` is ``True`` iff ``|expected - actual| <= tolerance``.

    Examples
    --------

    >>> Check("p(a=b=c)", Fraction(25, 64), 0.390625, 1e-12).passed
    True

    """
    name: str
    expected: float
    actual: float
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.expected = float(self.expected)
        self.actual = float(self.actual)
        self.tolerance = float(self.tolerance)
        self.passed = abs(self.expected - self.actual) <= self.tolerance

    def to_dict(self):
        return {"name": self.name, "expected": self.expected, "actual": self.actual,
                "tolerance": self.tolerance, "passed": self.passed}


@dataclass
class RunReport:
    """
    The output of one command: the echoed inputs, the results and the checks.

    ``table`` is the correlation table written by ``--format csv``.
    """
    command: str
    inputs: Dict[str, Any] = field(default_factory=dict)
    results: Dict[str, Any] = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)
    table: CorrelationTable = None

    def check(self, name, expected, actual, tolerance):
        self.checks.append(Check(name, expected, actual, tolerance))
        return self.checks[-1]

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    @property
    def exit_code(self):
        return 0 if self.passed else 1

    def to_dict(self):
        data = {"command": self.command,
                "inputs": to_builtin(self.inputs),
                "results": to_builtin(self.results),
                "checks": [check.to_dict() for check in self.checks],
                "passed": self.passed}
        if self.table is not None:
            data["table"] = self.table.to_dict()
        return data

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self):
        """
        Writes the table as ``(outcomes..., inputs..., p)`` rows when there is one; otherwise
        writes ``(check, expected, actual, tolerance, passed)`` rows.
        """
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        if self.table is not None:
            writer.writerow(self.table.csv_header())
            writer.writerows(self.table.csv_rows())
        else:
            writer.writerow(["check", "expected", "actual", "tolerance", "passed"])
            for check in self.checks:
                writer.writerow([check.name, check.expected, check.actual, check.tolerance, check.passed])
        return buffer.getvalue()

    def render(self, format="json"):
        if format not in FORMATS:
            raise JMNetUsageError(f"Unknown format '{format}'. Use one of {FORMATS}.")
        return self.to_json() if format == "json" else self.to_csv()

    def write(self, path=None, format="json"):
        """Writes the rendered report to ``path``, or returns it if ``path`` is ``None``."""
        text = self.render(format)
        if path is None:
            return text
        with open(path, "w", encoding="utf-8", newline="") as file:
            file.write(text if text.endswith("\n") else text + "\n")
        return text
