"""Soundness apparatus: code-space projectors, the decoding channel Xi_N, and the rejection bound."""
import itertools
import logging
from functools import lru_cache
from typing import Sequence, Tuple, Union

import numpy as np

from encoding.encoder import soundness_decode
from encoding.key import level_for
from lch.model import LchInstance
from lch.oracles import term_energy
from qsim.dense import DenseMixture, DenseOperator, DenseState, check_cap, dense_apply
from qsim.pauli import DimensionError, PauliString, pauli_matrix
from sampler.challenge import pad_shift
from steane.code import D7_0, D7_1, NotACodewordError, SteaneCode, logical_decode, transversal, xor_bits

logger = logging.getLogger(__name__)

MAX_PROJECTOR_N = 7
_PAULIS = "IXYZ"


class SoundnessViolation(RuntimeError):
    """Rejection probability fell below the energy bound."""


def _diag_projector(words: Sequence[str], N: int) -> np.ndarray:
    diag = np.zeros(2**N)
    for w in words:
        diag[int(w, 2)] = 1
    return np.diag(diag).astype(complex)


@lru_cache(maxsize=None)
def _transversal_pauli(letter: str, N: int) -> np.ndarray:
    return pauli_matrix(PauliString.from_label(letter * N))


def projectors(N: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(Pi_0, Pi_1, Delta_0, Delta_1) as 2^N x 2^N matrices.

    Pi_b projects onto D_N^b; Delta_b onto strings of parity b. N = 1 is the
    degenerate repetition case D_1^b = {b}.
    """
    if N == 1:
        words = (("0",), ("1",))
    elif N == 7:
        words = (D7_0, D7_1)
    else:
        raise ValueError(f"projectors are materialized for N in (1, {MAX_PROJECTOR_N}), got {N}")
    identity = np.eye(2**N, dtype=complex)
    z_all = _transversal_pauli("Z", N)
    return (
        _diag_projector(words[0], N),
        _diag_projector(words[1], N),
        (identity + z_all) / 2,
        (identity - z_all) / 2,
    )


def _check_size(N: int) -> None:
    if not 1 <= N <= MAX_PROJECTOR_N:
        raise ValueError(f"Xi_N is evaluated densely for 1 <= N <= {MAX_PROJECTOR_N}, got {N}")


def _xi_matrix(sigma: np.ndarray, N: int) -> np.ndarray:
    """Xi_N on an arbitrary (not necessarily positive) 2^N x 2^N matrix."""
    out = np.zeros((2, 2), dtype=complex)
    for letter in _PAULIS:
        coeff = np.trace(_transversal_pauli(letter, N) @ sigma)
        out += coeff * pauli_matrix(PauliString.from_label(letter))
    return out / 2


def xi_apply(sigma: DenseOperator) -> DenseOperator:
    """Xi_N(sigma) = (sum over P in I,X,Y,Z of <P^N, sigma> P) / 2."""
    _check_size(sigma.k)
    return DenseOperator(1, _xi_matrix(sigma.matrix, sigma.k))


def xi_adjoint(tau: Union[DenseOperator, np.ndarray], N: int) -> np.ndarray:
    """Xi_N*(tau) = (sum over P of tr(P tau) P^N) / 2."""
    _check_size(N)
    tau = tau.matrix if isinstance(tau, DenseOperator) else np.asarray(tau, dtype=complex)
    out = np.zeros((2**N, 2**N), dtype=complex)
    for letter in _PAULIS:
        coeff = np.trace(pauli_matrix(PauliString.from_label(letter)) @ tau)
        out += coeff * _transversal_pauli(letter, N)
    return out / 2


def choi_matrix(N: int) -> np.ndarray:
    """sum_ij |i><j| (x) Xi_N(|i><j|); PSD exactly when Xi_N is completely positive."""
    _check_size(N)
    dim = 2**N
    choi = np.zeros((2 * dim, 2 * dim), dtype=complex)
    for i, j in itertools.product(range(dim), repeat=2):
        unit = np.zeros((dim, dim), dtype=complex)
        unit[i, j] = 1
        choi += np.kron(unit, _xi_matrix(unit, N))
    return choi


def is_completely_positive(N: int, atol: float = 1e-12) -> bool:
    return bool(np.linalg.eigvalsh(choi_matrix(N)).min() >= -atol)


def _outcome_distribution(xi: Union[DenseState, DenseMixture], circuit) -> np.ndarray:
    if isinstance(xi, DenseState):
        return dense_apply(xi, circuit).probabilities()
    return sum(w * dense_apply(s, circuit).probabilities() for w, s in xi.components)


def soundness_check(
    inst: LchInstance,
    xi: Union[DenseState, DenseMixture],
    perm: Sequence[int],
    a: str,
    b: str,
    j: int,
) -> Tuple[float, float]:
    """(reject probability, <H_j, Xi(xi)>) against the best-responding prover.

    The prover, holding the claimed (perm, a, b), answers every outcome whose
    support code strings all decode with at least one logical 1, and ignores
    traps. The verifier measures honestly. Raises SoundnessViolation when the
    rejection probability falls below the bound by more than 1e-9.
    """
    term = inst.term(j)
    N = len(perm) // 2
    width = 2 * N
    if xi.k != inst.n * width:
        raise DimensionError(f"state on {xi.k} qubits, expected {inst.n * width}")
    check_cap(xi.k)
    code = SteaneCode.level(level_for(N))

    circuit = transversal(term.clifford.embed(list(term.support), inst.n), width)
    probs = _outcome_distribution(xi, circuit)
    c, _, _ = pad_shift(term.clifford, term.support, a, b, N)

    accept = 0.0
    for idx in np.flatnonzero(probs > 1e-15):
        u = xor_bits(format(int(idx), f"0{xi.k}b"), c)
        try:
            logical = [
                logical_decode("".join(u[blk * width + perm[q]] for q in range(N)), code) for blk in term.support
            ]
        except NotACodewordError:
            continue
        if any(logical):
            accept += float(probs[idx])

    reject = 1.0 - accept
    bound = term_energy(term, soundness_decode(xi, perm, a, b, N))
    if reject < bound - 1e-9:
        logger.error(f"Soundness inequality violated for term {j}: reject={reject:.6f} < bound={bound:.6f}")
        raise SoundnessViolation(f"term {j}: reject {reject:.6f} < bound {bound:.6f}")
    return reject, bound
