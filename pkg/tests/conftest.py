import pytest


@pytest.fixture(scope="session")
def atom_laser():
    """Internal-unit setup of the atom laser scenario: (scales, field, E, depth)."""
    from matterwave.cli import _setup, parse_config
    from matterwave.scales import to_dimensionless
    sc = parse_config("[scenario]\nname = atom_laser\n")
    scales, field, E, _ = _setup(sc)
    depth = to_dimensionless(1e-3, "length", scales)
    return scales, field, E, depth


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
