"""Collects acceptance-criterion outcomes and prints one line per criterion."""

_RESULTS = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::" not in report.nodeid:
        return
    props = dict(report.user_properties)
    # a test that raised before tagging itself is still listed under its own name
    label = props.get("criterion", report.nodeid.rpartition("::")[2])
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _RESULTS[label] = (report.outcome == "passed", props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_RESULTS):
        ok, detail = _RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}  {detail}".rstrip())
