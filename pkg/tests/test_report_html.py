from helper_functions.report_html import generate_html_report

RECORDS = [
    {"suite": "nd-kernel", "instance": 0, "check": "outcome", "description": "K5", "expected": "D", "actual": "D", "passed": True},
    {"suite": "nd-kernel", "instance": 1, "check": "outcome", "description": "<P4>", "expected": "D", "actual": "N", "passed": False},
    {"suite": "nd-kernel", "instance": 1, "check": "size", "description": "<P4>", "expected": "True", "actual": "False", "passed": False},
]


def test_failed_checks_are_grouped_per_instance():
    html = generate_html_report(
        {"suite": "nd-kernel", "seed": 3, "records": RECORDS, "summary": {"total": 3, "passed": 1, "failed": 2, "passRate": 33.33}}
    )
    assert html.count('<section class="failure">') == 1
    assert "nd-kernel #1" in html
    assert "Seed: 3" in html
    assert "&lt;P4&gt;" in html and "<P4>" not in html
    assert "<tr><td>nd-kernel</td><td>1</td><td>2</td></tr>" in html


def test_all_passing_report():
    html = generate_html_report({"records": RECORDS[:1], "summary": {"total": 1, "passed": 1, "failed": 0, "passRate": 100.0}})
    assert "All checks agree with the solver." in html
    assert "Failed checks" not in html
