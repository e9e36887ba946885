import numpy as np
import pytest

from tailmix.data import Sample
from tailmix.monte_carlo import DesignSpec, generate_dataset, replication_rng


def mixture_sample(n, lambdas, seed=0, beta=5.0, mu=0.0):
    design = DesignSpec(mu=mu, beta=beta, p_t1_given_x=tuple(lambdas), n=n, reps=1)
    return generate_dataset(design, replication_rng(seed, 0))


@pytest.fixture
def two_label_sample():
    return mixture_sample(4000, (0.25, 0.75), seed=3)


@pytest.fixture
def three_label_sample():
    return mixture_sample(6000, (0.25, 0.5, 0.75), seed=4)


@pytest.fixture
def tiny_sample():
    y = np.array([3.0, 1.0, 2.0, 5.0, 4.0, 0.5])
    return Sample.from_arrays(y, ["a", "b", "a", "b", "a", "b"])


ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    line = f"CRITERION {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print("\n" + line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
