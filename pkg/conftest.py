import os
import time
import webbrowser
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from helper_functions.file_reader import read_json_files_from_folder, write_json_atomic
from helper_functions.report_html import generate_html_report

BASE_DIR = Path(__file__).resolve().parent
TEST_RESULTS_DIR = BASE_DIR / "tests" / "test-results"

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=150, deadline=None, derandomize=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


class OracleLog:
    """Per-worker record of oracle comparisons, flushed to results_<worker>.json."""

    def __init__(self, path: Path):
        self.path = path
        self.checks = []

    def record(self, suite: str, check: str, description: str, expected, actual) -> bool:
        passed = expected == actual
        self.checks.append(
            {
                "suite": suite,
                "instance": len(self.checks),
                "check": check,
                "description": description,
                "expected": str(expected),
                "actual": str(actual),
                "passed": passed,
            }
        )
        return passed

    def flush(self) -> None:
        if self.checks:
            write_json_atomic(self.path, {"checks": self.checks})


@pytest.fixture(scope="session")
def oracle_log():
    worker_id = os.environ.get("PYTEST_XDIST_WORKER", "master")
    log = OracleLog(TEST_RESULTS_DIR / f"results_{worker_id}.json")
    yield log
    log.flush()


def pytest_sessionfinish(session, exitstatus):
    """Aggregate oracle comparisons, generate HTML report (main process only)."""
    if hasattr(session.config, "workerinput"):
        return
    if not TEST_RESULTS_DIR.exists():
        return

    all_checks = read_json_files_from_folder(TEST_RESULTS_DIR, "checks", "results_*.json")
    if not all_checks:
        return

    total = len(all_checks)
    failed = sum(1 for c in all_checks if not c.get("passed"))
    summary = {
        "total": total,
        "passed": total - failed,
        "failed": failed,
        "passRate": round(((total - failed) / total) * 100, 2) if total else 0,
    }

    final_output = {
        "title": "mbdom-game oracle comparisons",
        "generatedAt": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "summary": summary,
        "records": all_checks,
    }

    # JSON report
    final_json = write_json_atomic(TEST_RESULTS_DIR / "all_checks_results.json", final_output)
    print(f"[INFO] Final aggregated JSON: {final_json}")

    # HTML report
    html_report = TEST_RESULTS_DIR / "report.html"
    html_report.write_text(generate_html_report(final_output), encoding="utf-8")
    print(f"[INFO] HTML report: {html_report}")

    if os.environ.get("MBDOM_OPEN_REPORT"):
        webbrowser.open(html_report.as_uri())

    # Clean worker JSONs
    for f in TEST_RESULTS_DIR.glob("results_*.json"):
        f.unlink()
