import math

import numpy as np
import pytest

from fewphoton.fock import density_from_state
from fewphoton.presets import CORRELATION_SETS, NEGATIVITY_DEMO, TWO_ATOM_STATE, VACUUM

_ACCEPTANCE = []


@pytest.fixture
def demo_params():
    return NEGATIVITY_DEMO


@pytest.fixture
def demo_rho():
    return density_from_state(NEGATIVITY_DEMO.state())


@pytest.fixture
def vacuum_rho():
    return density_from_state(VACUUM.state())


@pytest.fixture
def fock_rho():
    def make(n, dim=8):
        rho = np.zeros((dim, dim), dtype=complex)
        rho[n, n] = 1.0
        from fewphoton.fock import DensityMatrix

        return DensityMatrix(rho)

    return make


@pytest.fixture
def all_named_states():
    states = {"demo": NEGATIVITY_DEMO, "two_atom": TWO_ATOM_STATE}
    states.update(CORRELATION_SETS)
    return states


def amplitude_damping(rho0, eta):
    """Independent oracle: apply the pure-loss channel with transmissivity eta via Kraus sums."""
    rho0 = np.asarray(rho0)
    dim = rho0.shape[0]
    out = np.zeros_like(rho0)
    for m in range(dim):
        for n in range(dim):
            total = 0j
            for k in range(dim - max(m, n)):
                total += (
                    math.sqrt(math.comb(m + k, k) * math.comb(n + k, k))
                    * eta ** ((m + n) / 2)
                    * (1 - eta) ** k
                    * rho0[m + k, n + k]
                )
            out[m, n] = total
    return out


def pytest_runtest_makereport(item, call):
    if call.when == "call" and item.module.__name__.endswith("test_acceptance"):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _ACCEPTANCE.append((doc, call.excinfo is None))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}")
