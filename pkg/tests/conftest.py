import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA_DIR = Path(__file__).parent / "data"


def user_data(name):
    """Path to a third-party network supplied by the user, or None.

    Looked up in $COMMVUL_DATA_DIR, then in tests/data/.
    """
    roots = [Path(os.environ["COMMVUL_DATA_DIR"])] if os.environ.get("COMMVUL_DATA_DIR") else []
    roots.append(DATA_DIR)
    for root in roots:
        path = root / name
        if path.exists():
            return path
    return None


@pytest.fixture(scope="session")
def example9():
    from commvul.datasets import example9 as load

    return load()


@pytest.fixture(scope="session")
def karate():
    from commvul.datasets import karate as load

    return load()


@pytest.fixture(scope="session")
def five():
    from commvul.datasets import five_communities

    return five_communities()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(RESULTS):
        parts = RESULTS[criterion]
        ran = [p for p in parts if p[1] is not None]
        if not ran:
            status = "SKIP"
        else:
            status = "PASS" if all(ok for _, ok, _ in ran) else "FAIL"
        detail = "; ".join(f"{name}: {'skip' if ok is None else ('ok' if ok else 'FAIL')} - {d}"
                           for name, ok, d in parts)
        terminalreporter.write_line(f"{criterion} {status}  {detail}")
