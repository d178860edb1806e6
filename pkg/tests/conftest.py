import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from oracles import CHAIN_COUPLING, CHAIN_OMEGAS

from zenosim import PureState, build_chain_hamiltonian, entangled_initial_state


@pytest.fixture(scope="session")
def chain():
    """The benchmark 3-level chain Hamiltonian."""
    return build_chain_hamiltonian(CHAIN_OMEGAS, CHAIN_COUPLING)


@pytest.fixture(scope="session")
def psi0():
    return entangled_initial_state()


@pytest.fixture(scope="session")
def rabi():
    """Two-level pure-coupling system and its ground basis state."""
    h = build_chain_hamiltonian([0.0, 0.0], CHAIN_COUPLING)
    return h, PureState(np.array([1.0, 0.0], dtype=complex))
