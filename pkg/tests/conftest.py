import pytest

# criterion id -> (passed, detail); filled by test_acceptance, printed at the end
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[1:])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key:>4} {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def record():
    def _record(key: str, ok: bool, detail: str) -> bool:
        ACCEPTANCE[key] = (bool(ok), detail)
        print(f"{key} {'PASS' if ok else 'FAIL'}  {detail}")
        return bool(ok)

    return _record
