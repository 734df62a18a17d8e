import pytest
from hypothesis import HealthCheck, settings

from skewcert.exactcore import FieldEndo

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large]
)
settings.load_profile("default")

V = ("x", "y")

MAPS = {
    "henon": (["1 + y - x^2", "x"], ["y", "x - 1 + y^2"]),
    "monomial": (["x", "x*y"], ["x", "y/x"]),
    "cremona": (["1/x", "1/y"], ["1/x", "1/y"]),
    "affine": (["y", "x + 1"], ["y - 1", "x"]),
}


def make_map(name: str) -> FieldEndo:
    images, inverse = MAPS[name]
    return FieldEndo.from_strings(V, images, inverse, name=name)


# shared σ objects: SkewElement equality is by σ identity
SIGMAS = {name: make_map(name) for name in MAPS}
PIS = {
    "swap": FieldEndo.from_strings(V, ["y", "x"], ["y", "x"]),
    "shift": FieldEndo.from_strings(V, ["x + 1", "y - x"], ["x - 1", "y + x - 1"]),
    "monomial": FieldEndo.from_strings(V, ["x", "x*y"], ["x", "y/x"]),
}


@pytest.fixture
def henon():
    return make_map("henon")


@pytest.fixture
def monomial():
    return make_map("monomial")


# -- one PASS/FAIL line per acceptance criterion ----------------------------------

_ACCEPTANCE: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    failed = report.failed or (report.when == "call" and report.skipped)
    prev = _ACCEPTANCE.get(number)
    ok = (prev[1] if prev else True) and not failed
    if report.when == "call" or failed:
        _ACCEPTANCE[number] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}")
