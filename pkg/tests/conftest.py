import sys
from pathlib import Path

import numpy as np
import pytest

PROJECT_ROOT = Path(__file__).parent.parent.absolute()
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from lch.model import LchInstance, LchTerm, VerificationCircuit  # noqa: E402
from qsim.circuit import CliffordCircuit  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def zero_penalty_instance():
    """One qubit, one term |0><0|: |1> passes every challenge, |0> fails every challenge."""
    term = LchTerm(CliffordCircuit.identity(1), (0,), "zero")
    return LchInstance(n=1, terms=(term,), p=2, q=1)


@pytest.fixture
def two_term_instance():
    """|0><0| on qubit 0 and |+><+| on qubit 1 (C = H maps |+> to |0>)."""
    terms = (
        LchTerm(CliffordCircuit.identity(1), (0,), "zero"),
        LchTerm(CliffordCircuit(1, (("H", 0),)), (1,), "plus"),
    )
    return LchInstance(n=2, terms=terms, p=3, q=2)


@pytest.fixture
def single_cp_circuit():
    """Controlled-P on a witness qubit and one ancilla; output is the witness qubit."""
    return VerificationCircuit(n_witness=1, n_ancilla=1, gates=(("CP", 0, 1),), output=0)
