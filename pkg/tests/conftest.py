import pytest

_RESULTS = pytest.StashKey[dict]()


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    # keep the CLI cache out of the user's home directory
    monkeypatch.setenv("ITLOG_CACHE_DIR", str(tmp_path / "cache"))


@pytest.fixture
def criterion(request):
    """Record one acceptance line per criterion; the outcome is read from the test report."""
    table = request.config.stash.setdefault(_RESULTS, {})

    def record(number, text):
        table[request.node.nodeid] = (number, text)

    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    table = item.config.stash.get(_RESULTS, {})
    if rep.when == "call" and item.nodeid in table:
        number, text = table[item.nodeid]
        table[item.nodeid] = (number, text, rep.passed)


def pytest_terminal_summary(terminalreporter, config):
    table = config.stash.get(_RESULTS, {})
    merged = {}
    for v in table.values():
        if len(v) == 3:
            number, text, ok = v
            _, prev, cases = merged.get(number, (text, True, 0))
            merged[number] = (text, prev and ok, cases + 1)
    if not merged:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(merged):
        text, ok, cases = merged[number]
        extra = f" [{cases} cases]" if cases > 1 else ""
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {text}{extra}")
