"""Pass/fail lines collected by the acceptance suite and printed at session end."""

RESULTS: dict[int, str] = {}


def record(n: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"criterion {n:>2} [{'PASS' if ok else 'FAIL'}] {title}"
    if detail:
        line += f": {detail}"
    RESULTS[n] = line
    print(line)
