"""Shared fixtures and the acceptance-criteria reporting hook."""

from __future__ import annotations

import json

import numpy as np
import pytest

from qfcsim.cli import main as cli_main
from qfcsim.core import LossSet

#: (criterion number, "PASS ..."/"FAIL ..." line) tuples collected by the
#: acceptance tests and printed once in the terminal summary.
ACCEPTANCE_LINES: list[tuple[int, str]] = []


def record_criterion(number: int, ok: bool, detail: str) -> None:
    verdict = "PASS" if ok else "FAIL"
    ACCEPTANCE_LINES.append((number, f"{verdict} criterion {number}: {detail}"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES, key=lambda pair: pair[0]):
        terminalreporter.write_line(line)


@pytest.fixture()
def bench_losses() -> LossSet:
    """Loss triple used throughout the measured-device examples."""
    return LossSet(alpha1_per_cm=0.22, alpha2_per_cm=0.20, alpha3_per_cm=0.12)


@pytest.fixture()
def two_peak_profile_arrays():
    """Noise-versus-temperature fixture: two peaks over a gentle bowl.

    One peak sits on the zero-detuning operating temperature (33.0 C), the
    other at 30.0 C; the bowl makes the valley near 31.4 C the unique
    interior minimum so detuning suggestions are unambiguous.
    """
    temps = np.round(np.arange(28.0, 36.0 + 1e-9, 0.05), 10)
    counts = (
        300.0
        + 8.0 * (temps - 31.4) ** 2
        + 900.0 * np.exp(-(((temps - 33.0) / 0.35) ** 2))
        + 650.0 * np.exp(-(((temps - 30.0) / 0.5) ** 2))
    )
    return temps, counts


@pytest.fixture()
def run_cli(capsys):
    """Invoke the CLI in-process; returns (exit_code, stdout_json, stderr)."""

    def run(argv: list[str]):
        code = cli_main(argv)
        captured = capsys.readouterr()
        payload = json.loads(captured.out) if captured.out.strip() else None
        return code, payload, captured.err

    return run
