import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from qcr import clifford_quadric, diagonal_quadric, dump_spec, split_hypersurface

settings.register_profile("repo", derandomize=True, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

SPEC_DIR = Path(__file__).resolve().parent.parent / "demos" / "specs"


@pytest.fixture(scope="session")
def spec_files(tmp_path_factory):
    """Spec JSON files for the standard examples."""
    root = tmp_path_factory.mktemp("specs")
    files = {}
    for name, spec in [("hypersurface", split_hypersurface()), ("clifford", clifford_quadric()),
                       ("zero", diagonal_quadric([0, 0, 0, 0])),
                       ("eps", diagonal_quadric([-1, -1, 1, 1]))]:
        path = root / f"{name}.json"
        dump_spec(spec, path)
        files[name] = str(path)
    bad = root / "bad.json"
    bad.write_text(json.dumps({"n": 2, "d": 1, "forms": [{"re": [[1, 2], [3, 1]]}]}))
    files["bad"] = str(bad)
    broken = root / "broken.json"
    broken.write_text('{"n": 2,\n "d": 1,\n "forms": [}')
    files["broken"] = str(broken)
    return files


ACCEPTANCE: dict = {}


@pytest.fixture
def criterion():
    """Record one acceptance criterion: ``criterion(number, title, passed, detail)``."""
    def record(number, title, passed, detail=""):
        ACCEPTANCE[number] = (title, bool(passed), detail)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[number]
        mark = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{mark}] {number:2d}. {title}" + (f" ({detail})" if detail else ""))
