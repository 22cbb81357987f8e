import numpy as np
import pytest

from hbinterp import Chart, Manifold, Patch, sample_patch


@pytest.fixture
def sphere():
    return Manifold.sphere(1.0)


@pytest.fixture
def cap(sphere):
    return Patch(sphere, [0.0, 0.0, 1.0], 0.8)


@pytest.fixture
def cap_chart(cap):
    return Chart.for_patch(cap)


@pytest.fixture
def cap_nodes(cap):
    return sample_patch(cap, 100, "quasi-uniform", seed=0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_sphere_points(rng, n, radius=1.0):
    x = rng.standard_normal((n, 3))
    return radius * x / np.linalg.norm(x, axis=1, keepdims=True)


_ACCEPTANCE = pytest.StashKey()


@pytest.fixture
def acceptance(request):
    """Record ``(number, title, passed, detail)`` for the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(number, title, passed, detail):
        lines[number] = f"criterion {number} {'PASS' if passed else 'FAIL'}: {title} ({detail})"
        print(lines[number])
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
