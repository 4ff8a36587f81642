import re

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")
_outcomes: dict[int, tuple[str, bool]] = {}


def pytest_runtest_logreport(report):
    match = _CRITERION.search(report.nodeid)
    if not match:
        return
    number, slug = int(match.group(1)), match.group(2).replace("_", " ")
    failed = report.failed or (report.when == "call" and report.skipped)
    _, already_failed = _outcomes.get(number, (slug, False))
    _outcomes[number] = (slug, already_failed or failed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        slug, failed = _outcomes[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'FAIL' if failed else 'PASS'}  {slug}")
