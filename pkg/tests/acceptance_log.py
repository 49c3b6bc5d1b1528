"""Collects one PASS/FAIL line per acceptance criterion for the run summary."""

LINES = []


def record(number, ok, detail):
    status = "PASS" if ok else "FAIL"
    LINES.append(f"criterion {number:02d}: {status} - {detail}")
