import numpy as np
import pytest
from hypothesis import settings

from lacunorm.lacunary import LacunarySequence
from lacunorm.norms import Exponents, SpaceSpec
from lacunorm.orlicz import OrliczFunction
from lacunorm.transform import LambdaSystem

# wall-clock deadlines only add flakiness to numerical properties
settings.register_profile("suite", deadline=None)
settings.load_profile("suite")


def make_space(M=None, lam=None, theta=None, s=None, target="c0", include_k0=True):
    return SpaceSpec(
        M=M or OrliczFunction.identity(),
        theta=theta or LacunarySequence.geometric(2, 1),
        lam=lam or LambdaSystem.shift(),
        s=s or Exponents(),
        target=target,
        include_k0=include_k0,
    )


@pytest.fixture
def space():
    return make_space()


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(label, passed, detail)``."""
    store = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(label, passed, detail=""):
        line = f"{'PASS' if passed else 'FAIL'}  criterion {label}: {detail}"
        store[label] = line
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(_ACCEPTANCE, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(store, key=lambda s: (int(s.split()[0]), s)):
        terminalreporter.write_line(store[label])
