import random

import pytest

from geomcluster.graph import gen_random

# criterion number -> (ok, detail); filled by test_acceptance and echoed at the end
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def random_instance(rng: random.Random, n_max: int, weighted: bool | None = None, n_min: int = 1):
    n = rng.randint(n_min, n_max)
    if weighted is None:
        weighted = rng.random() < 0.5
    prob = rng.choice([0.02, 0.05, 0.1, 0.2, 0.4])
    return gen_random(n, prob, 4 if weighted else 1, rng.randrange(2**32))


@pytest.fixture
def rng(request):
    return random.Random(request.node.name)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
