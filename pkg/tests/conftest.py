import pytest

from graphdiff.model import fixture_graph

import acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines.LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def g0():
    """The small worked-example graph used by frozen expectations."""
    return fixture_graph()


@pytest.fixture
def ref_cypher(g0):
    from graphdiff.adapters import ReferenceAdapter

    adapter = ReferenceAdapter("cypher")
    adapter.load(g0)
    return adapter


@pytest.fixture
def ref_gremlin(g0):
    from graphdiff.adapters import ReferenceAdapter

    adapter = ReferenceAdapter("gremlin")
    adapter.load(g0)
    return adapter
