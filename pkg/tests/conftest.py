import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from htk.taxonomy import build_taxonomy, load_default_taxonomy  # noqa: E402

# label order of the ten-label worked example
EXAMPLE_SIMPLE = ["iC", "Gor", "Al", "Ael", "Acp", "Bt", "Bs", "Bv", "Btv"]
EXAMPLE_MIXTURES = ["Al-Bv"]


@pytest.fixture(scope="session")
def example_taxonomy():
    return build_taxonomy(EXAMPLE_SIMPLE + EXAMPLE_MIXTURES, leaf_order="given")


@pytest.fixture(scope="session")
def default_taxonomy():
    return load_default_taxonomy()


@pytest.fixture(scope="session")
def mixed_taxonomy():
    """Small taxonomy covering every enumerated inner-product case."""
    simple = ["Ah", "Al", "Ap", "Ael", "Bv", "Bt", "Cv", "Sd", "Sw", "M"]
    mixtures = ["Al-Bt", "Ah-Bv", "Sd-Bv", "Bv-Cv", "Bv-Ael", "Sw-Ah", "Sw-Ap", "Bt-Al", "Sd-Bt", "M-Sw"]
    return build_taxonomy(simple + mixtures)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
