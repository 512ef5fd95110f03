"""Acceptance criteria, one test each; every test prints a PASS/FAIL summary line.

Run on its own with ``pytest tests/test_acceptance.py -v`` or
``python tests/test_acceptance.py``.
"""

import sys
import time

import pytest

from perspline.acceptance import CRITERIA, run_criterion, summary_line
from perspline.cli import main

VERIFY_ALL_BUDGET_S = 120.0


def report_line(capsys, line):
    with capsys.disabled():
        print("\n" + line)


def describe_failures(res, limit=8):
    bad = res.failures()
    lines = [f"{c.name}: {c.value!r} vs limit {c.limit!r} (r={c.r}, N={c.N}, l={c.l}, {c.function or '-'})"
             for c in bad[:limit]]
    if len(bad) > limit:
        lines.append(f"... {len(bad) - limit} more")
    if not res.within_budget:
        lines.append(f"runtime {res.elapsed_s:.2f}s exceeds budget {res.budget_s:g}s")
    return "\n".join(lines)


@pytest.mark.acceptance
@pytest.mark.parametrize("number", [num for num, *_ in CRITERIA], ids=lambda n: f"criterion_{n:02d}")
def test_criterion(number, capsys):
    res = run_criterion(number)
    report_line(capsys, summary_line(res))
    if not res.passed:
        pytest.fail(describe_failures(res), pytrace=False)


@pytest.mark.acceptance
def test_criterion_12_verify_all_end_to_end(tmp_path, capsys):
    start = time.perf_counter()
    first = main(["verify-all", "--out", str(tmp_path / "first.csv")])
    elapsed = time.perf_counter() - start
    second = main(["verify-all", "--out", str(tmp_path / "second.csv")])
    capsys.readouterr()
    identical = (tmp_path / "first.csv").read_bytes() == (tmp_path / "second.csv").read_bytes()
    ok = first == 0 and elapsed < VERIFY_ALL_BUDGET_S and identical
    report_line(capsys, f"[{'PASS' if ok else 'FAIL'}] criterion 12: verify-all end to end "
                        f"(exit {first}, {elapsed:.2f}s / {VERIFY_ALL_BUDGET_S:g}s, "
                        f"reruns {'identical' if identical else 'differ'})")
    assert identical
    assert second == first
    assert elapsed < VERIFY_ALL_BUDGET_S
    assert first == 0, "verify-all reported failing criteria"


if __name__ == "__main__":
    failed = 0
    for num, *_ in CRITERIA:
        res = run_criterion(num)
        print(summary_line(res))
        failed += not res.passed
    sys.exit(1 if failed else 0)
