from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

import re

_ACCEPTANCE: dict[int, list] = {}


def pytest_runtest_logreport(report):
    """Collect outcomes of acceptance tests, keyed by criterion number."""
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    m = re.search(r"test_c(\d+)", report.nodeid)
    if m:
        _ACCEPTANCE.setdefault(int(m.group(1)), []).append((report.nodeid.split("::")[-1], report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        parts = _ACCEPTANCE[num]
        ok = all(p for _, p in parts)
        failed = [name for name, p in parts if not p]
        detail = "" if ok else "  (failing: " + ", ".join(failed) + ")"
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}{detail}")
