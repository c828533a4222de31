import re


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, with the measured values."""
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_", getattr(rep, "nodeid", ""))
            if m and rep.when == "call":
                detail = dict(rep.user_properties).get("measured", "")
                rows.append((int(m.group(1)), "PASS" if outcome == "passed" else "FAIL", detail))
    if rows:
        terminalreporter.section("acceptance criteria")
        for n, status, detail in sorted(rows):
            terminalreporter.write_line(f"criterion {n}: {status}  {detail}")
