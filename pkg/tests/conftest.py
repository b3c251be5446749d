import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# One line per acceptance criterion, printed after the run so the result
# of each is visible even when everything passes.
acceptance_lines = []


def record_criterion(number, name, ok, detail):
    acceptance_lines.append(
        "criterion %d (%s): %s  [%s]"
        % (number, name, "PASS" if ok else "FAIL", detail)
    )


def pytest_terminal_summary(terminalreporter):
    if not acceptance_lines:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for line in sorted(acceptance_lines):
        terminalreporter.write_line(line)
