"""Collects one verdict line per acceptance criterion and prints them at the end."""
import pytest

_VERDICTS: dict[str, str] = {}


class Verdicts:
    def record(self, label: str, ok: bool, detail: str) -> bool:
        line = f"{label}: {'PASS' if ok else 'FAIL'} ({detail})"
        _VERDICTS[label] = line
        print(line, flush=True)
        return ok


@pytest.fixture(scope="session")
def verdicts():
    return Verdicts()


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_VERDICTS, key=lambda k: [int(p) if p.isdigit() else p for p in k.replace(".", " ").split()]):
        terminalreporter.write_line(_VERDICTS[key])
