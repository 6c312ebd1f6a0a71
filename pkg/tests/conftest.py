import pytest


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def acceptance_report(request):
    """Record one pass/fail summary line per acceptance criterion; the lines
    are replayed after the run (outside capture) by pytest_terminal_summary."""

    def _report(num, passed, detail):
        line = f"ACCEPTANCE {num:2d}: {'PASS' if passed else 'FAIL'} - {detail}"
        request.config._acceptance_lines.append((num, line))
        print(line)

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
