import pytest

from petalfdc.topology import CoreKind, PetalSpec
from petalfdc.tables import CCS_TABLE, HUB_TABLE

TABLE_CASES = ([("hub", nmk) for nmk in HUB_TABLE] + [("complete", nmk) for nmk in CCS_TABLE])


def spec_of(core, nmk):
    return PetalSpec.path(CoreKind.parse(core), *nmk)


@pytest.fixture(params=TABLE_CASES, ids=lambda c: f"{c[0]}{c[1]}")
def table_spec(request):
    return spec_of(*request.param)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
