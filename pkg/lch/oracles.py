"""Dense brute-force oracles for Clifford-Hamiltonian instances."""
import logging
from typing import Union

import numpy as np

from lch.model import LchInstance, LchTerm
from qsim.dense import (
    DenseOperator,
    DenseState,
    check_cap,
    circuit_unitary,
    embed_operator,
    reduced_density,
)

logger = logging.getLogger(__name__)


def term_vector(term: LchTerm) -> np.ndarray:
    """C^dagger |0^k>, the state the term penalizes."""
    return circuit_unitary(term.clifford).conj().T[:, 0]


def term_projection(term: LchTerm) -> np.ndarray:
    v = term_vector(term)
    return np.outer(v, v.conj())


def term_matrix(term: LchTerm, n: int) -> np.ndarray:
    return embed_operator(term_projection(term), term.support, n)


def build_hamiltonian(inst: LchInstance) -> np.ndarray:
    check_cap(inst.n)
    h = np.zeros((2**inst.n, 2**inst.n), dtype=complex)
    for term in inst.terms:
        h += term_matrix(term, inst.n)
    return h


def term_energy(term: LchTerm, rho: Union[DenseState, DenseOperator]) -> float:
    """tr(H_j rho), evaluated on the reduced state of the term's support."""
    v = term_vector(term)
    local = reduced_density(rho, term.support)
    return float(np.real(np.vdot(v, local.matrix @ v)))


def energy(inst: LchInstance, rho: Union[DenseState, DenseOperator]) -> float:
    if rho.k != inst.n:
        raise ValueError(f"state on {rho.k} qubits, instance on {inst.n}")
    return sum(term_energy(t, rho) for t in inst.terms)


def spectrum(inst: LchInstance, count: int = 2) -> np.ndarray:
    return np.linalg.eigvalsh(build_hamiltonian(inst))[:count]


def ground_energy(inst: LchInstance) -> float:
    return float(spectrum(inst, 1)[0])


def ground_state(inst: LchInstance) -> DenseState:
    """Lowest eigenvector of the assembled Hamiltonian (any one, if degenerate)."""
    _, vectors = np.linalg.eigh(build_hamiltonian(inst))
    return DenseState.from_vector(vectors[:, 0])
