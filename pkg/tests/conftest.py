import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import acceptance_log


def pytest_terminal_summary(terminalreporter):
    lines = acceptance_log.LINES
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines):
        terminalreporter.write_line(line)
