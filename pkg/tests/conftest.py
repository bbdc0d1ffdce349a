import pytest

# criterion number -> (verdict, detail), filled in by test_acceptance.py
CRITERIA: dict[int, tuple[str, str]] = {}


@pytest.fixture
def criterion():
    def record(n: int, ok, detail: str = "") -> None:
        verdict = {True: "PASS", False: "FAIL", None: "SKIP"}[ok]
        CRITERIA[n] = (verdict, detail)
        print(f"criterion {n}: {verdict} {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        verdict, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {verdict}  {detail}")
