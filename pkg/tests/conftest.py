from types import SimpleNamespace

import pytest

from fogsim.run import run
from fogsim.scenario import experiment, load_scenario

# criterion number -> (title, passed); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[str, bool]] = {}


@pytest.fixture(scope="session")
def toy_runs(tmp_path_factory):
    """The bundled toy scenario under both reference set-ups."""
    base = load_scenario("sanfrancisco.toy")
    out = {}
    for name in ("I", "II"):
        directory = tmp_path_factory.mktemp(f"toy_{name}")
        result = run(experiment(base, name), directory)
        out[name] = SimpleNamespace(out=directory, scenario=result.scenario, records=result.records,
                                    summary=result.summary, network=result.network)
    return out


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {title}")
