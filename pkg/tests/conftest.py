import math

import pytest

from pairfilter import units
from pairfilter.spectral import ALPHA, DEFAULT_CENTER_NM, SourceSpec

OMEGA0 = float(units.wavelength_nm_to_omega(DEFAULT_CENTER_NM))


def make_source(pump_sigma=3.0e10, pm_sigma=2.0e10, pm_angle=1.0, mu_total=1.0):
    return SourceSpec(
        pm_sigma=pm_sigma,
        pm_angle=pm_angle,
        pump_sigma=pump_sigma,
        mu_total=mu_total,
        center_s=OMEGA0,
        center_i=OMEGA0,
    )


def factorable_source(pm_sigma=2.0e10):
    """theta = 3pi/4 with the pump width that cancels the cross term."""
    return make_source(pump_sigma=2.0 * pm_sigma / ALPHA, pm_sigma=pm_sigma, pm_angle=3.0 * math.pi / 4.0)


@pytest.fixture
def source():
    return make_source()


# one summary line per acceptance criterion, aggregated over its tests
_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion exercised by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _criteria.setdefault(m.args[0], {"title": m.args[1], "outcomes": []})
            item.keywords[f"criterion_{m.args[0]}"] = True


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for n, entry in _criteria.items():
        if report.keywords.get(f"criterion_{n}"):
            entry["outcomes"].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        entry = _criteria[n]
        outs = entry["outcomes"]
        if not outs:
            status = "NOT RUN"
        elif all(o == "passed" for o in outs):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"criterion {n:>2} {status:<7} {entry['title']} ({len(outs)} checks)")
