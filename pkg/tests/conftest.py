import pytest

ACCEPTANCE: dict[int, tuple[str, bool, str, float]] = {}
CRITERIA = {
    1: "ratio constants",
    2: "tail-bound dominance",
    3: "closed-form tail bound numerics",
    4: "LP soundness",
    5: "per-edge lemma envelope",
    6: "end-to-end approximation",
    7: "jump-claim quadrature",
    8: "oracle equivalence",
}


@pytest.fixture
def record():
    def _record(number: int, ok: bool, detail: str, seconds: float) -> None:
        ACCEPTANCE[number] = (CRITERIA[number], bool(ok), detail, seconds)

    return _record


def pytest_terminal_summary(terminalreporter):
    ran = [i.nodeid for i in terminalreporter.stats.get("passed", []) + terminalreporter.stats.get("failed", [])]
    if not any("test_acceptance" in nid for nid in ran):
        return
    terminalreporter.section("acceptance criteria")
    for number, name in CRITERIA.items():
        if number in ACCEPTANCE:
            _, ok, detail, secs = ACCEPTANCE[number]
            status = "PASS" if ok else "FAIL"
            terminalreporter.write_line(f"[{status}] criterion {number}: {name} ({secs:.2f} s) {detail}")
        else:
            terminalreporter.write_line(f"[FAIL] criterion {number}: {name} (not run or errored)")
