"""Generate a standalone HTML report listing the failed checks of a harness or test run."""

from collections import Counter
from html import escape
from typing import Any, Dict, List

STYLE = """
    body { font: 14px/1.45 system-ui, sans-serif; margin: 0 auto; max-width: 1100px; padding: 24px; color: #222; }
    header { border-bottom: 2px solid #ddd; margin-bottom: 16px; }
    .meta { color: #777; font-size: 13px; word-break: break-all; }
    .tiles { display: grid; grid-template-columns: repeat(4, 1fr); gap: 12px; margin: 16px 0; }
    .tile { border: 1px solid #ddd; border-radius: 6px; padding: 10px 14px; }
    .tile b { display: block; font-size: 26px; }
    .ok { color: #1a7f37; } .bad { color: #c62828; }
    section.failure { border: 1px solid #ddd; border-left: 4px solid #c62828; border-radius: 6px; padding: 8px 16px; margin: 12px 0; }
    table { border-collapse: collapse; width: 100%; }
    th, td { border-bottom: 1px solid #eee; padding: 4px 8px; text-align: left; }
"""


def _cell(value: Any) -> str:
    return f"<td>{escape(str(value))}</td>"


def _suite_table(records: List[Dict[str, Any]]) -> str:
    totals = Counter(r.get("suite", "") for r in records)
    passed = Counter(r.get("suite", "") for r in records if r.get("passed"))
    rows = "".join(
        f"<tr>{_cell(suite)}{_cell(passed[suite])}{_cell(totals[suite] - passed[suite])}</tr>"
        for suite in sorted(totals)
    )
    return f"<table><tr><th>Suite</th><th>Passed</th><th>Failed</th></tr>{rows}</table>"


def _failed_sections(records: List[Dict[str, Any]]) -> List[str]:
    by_instance: Dict[tuple, List[Dict[str, Any]]] = {}
    for record in records:
        if not record.get("passed"):
            key = (record.get("suite", ""), record.get("instance", ""))
            by_instance.setdefault(key, []).append(record)

    sections = []
    for (suite, instance), failed in by_instance.items():
        rows = "".join(
            f"<tr>{_cell(r.get('check', ''))}{_cell(r.get('expected', ''))}{_cell(r.get('actual', ''))}</tr>"
            for r in failed
        )
        sections.append(
            f'<section class="failure"><h3>{escape(str(suite))} #{escape(str(instance))}</h3>'
            f'<p class="meta"><code>{escape(str(failed[0].get("description", "")))}</code></p>'
            f"<table><tr><th>Check</th><th>Expected</th><th>Actual</th></tr>{rows}</table></section>"
        )
    return sections


def generate_html_report(final_output: dict) -> str:
    records = final_output.get("records", [])
    summary = final_output.get("summary", {})
    title = escape(final_output.get("title", "Domination game checks"))

    meta = [f"Suite: {escape(str(final_output['suite']))}"] if "suite" in final_output else []
    if final_output.get("seed") is not None:
        meta.append(f"Seed: {escape(str(final_output['seed']))}")
    if final_output.get("generatedAt"):
        meta.append(f"Generated: {escape(final_output['generatedAt'])}")

    pass_rate = summary.get("passRate", 0)
    tiles = [
        ("Checks", summary.get("total", 0), ""),
        ("Passed", summary.get("passed", 0), "ok"),
        ("Failed", summary.get("failed", 0), "bad"),
        ("Pass rate", f"{pass_rate}%", "ok" if pass_rate == 100 else "bad"),
    ]
    tile_html = "".join(f'<div class="tile">{label}<b class="{cls}">{value}</b></div>' for label, value, cls in tiles)

    failures = _failed_sections(records)
    body = (
        "<h2>Failed checks</h2>" + "".join(failures)
        if failures
        else '<p class="ok">All checks agree with the solver.</p>'
    )
    return (
        f'<!DOCTYPE html>\n<html lang="en">\n<head><meta charset="UTF-8"><title>{title}</title>'
        f"<style>{STYLE}</style></head>\n<body>\n"
        f'<header><h1>{title}</h1><p class="meta">{" | ".join(meta)}</p></header>\n'
        f'<div class="tiles">{tile_html}</div>\n{_suite_table(records)}\n{body}\n</body>\n</html>'
    )
