"""Compile a verification circuit into a 5-local Clifford-Hamiltonian instance.

Register layout: data qubits 0..n_total-1 followed by clock qubits
c_0..c_T. Time t is the unary string 1^t 0^(T+1-t); c_T is a sentinel that
stays 0 at every legal time.

Every term is emitted as C^dagger |0..0><0..0| C. Terms are built from a
preparation circuit G with G|0..0> equal to the penalized vector, and C is
G's inverse.
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.config import Config
from lch.model import InstanceError, LchInstance, LchTerm, VerificationCircuit
from lch.oracles import spectrum
from qsim.circuit import CliffordCircuit
from qsim.dense import DenseState, check_cap

logger = logging.getLogger(__name__)

# clock qubit 0, data qubits 1 and 2
_CP_GADGETS: Tuple[Tuple[Tuple, ...], ...] = (
    (("H", 0), ("Z", 0)),
    (("H", 0), ("Z", 0), ("X", 2)),
    (("H", 0), ("Z", 0), ("X", 1)),
    (("H", 0), ("P", 0), ("P", 0), ("P", 0), ("X", 1), ("X", 2)),
)


def _cz(a: int, b: int) -> Tuple[Tuple, ...]:
    return (("H", b), ("CNOT", a, b), ("H", b))


_HH_GADGETS: Tuple[Tuple[Tuple, ...], ...] = (
    (("H", 0), ("H", 1), ("CNOT", 0, 2), ("CNOT", 1, 2), ("Z", 0)) + _cz(1, 2),
    (("H", 0), ("H", 1), ("Z", 0), ("CNOT", 1, 2)),
    (("H", 0), ("H", 1), ("X", 2), ("CNOT", 1, 2), ("Z", 1)),
    (("H", 0), ("H", 1), ("X", 2), ("CNOT", 0, 2), ("CNOT", 1, 2)) + _cz(1, 2) + (("Z", 0),),
)

_GADGETS = {"CP": _CP_GADGETS, "HH": _HH_GADGETS}


def gadget_preparations(tag: str) -> List[CliffordCircuit]:
    """Circuits preparing the four penalized vectors of one propagation step."""
    tag = str(tag).upper()
    if tag not in _GADGETS:
        raise InstanceError(f"no propagation gadget for gate {tag!r}")
    return [CliffordCircuit(3, gates) for gates in _GADGETS[tag]]


def decompose_propagation(tag: str) -> List[CliffordCircuit]:
    """Four 3-qubit Cliffords C_i with sum_i C_i^dagger|000><000|C_i equal to
    (I - |1><0| (x) U - |0><1| (x) U^dagger) / 2 on (clock, data, data)."""
    return [g.inverse() for g in gadget_preparations(tag)]


def _basis_term(support: Sequence[int], bits: str, label: str) -> LchTerm:
    """Standard-basis projection |bits><bits| on ``support``."""
    prep = CliffordCircuit(len(support), tuple(("X", i) for i, b in enumerate(bits) if b == "1"))
    return LchTerm(prep.inverse(), tuple(support), label)


def _propagation_terms(v: VerificationCircuit, t: int, clock: List[int]) -> List[LchTerm]:
    tag, d1, d2 = v.gates[t - 1]
    if t >= 2:
        support = [clock[t - 2], clock[t - 1], d1, d2, clock[t]]
        flip, gadget_at = [("X", 0)], [1, 2, 3]
    else:
        support = [clock[0], d1, d2, clock[1]]
        flip, gadget_at = [], [0, 1, 2]
    terms = []
    for i, gadget in enumerate(gadget_preparations(tag)):
        prep = CliffordCircuit(len(support), tuple(flip)).then(gadget.embed(gadget_at, len(support)))
        terms.append(LchTerm(prep.inverse(), tuple(support), f"prop:{t}:{tag}:{i}"))
    return terms


def compile_circuit(
    v: VerificationCircuit,
    p: int,
    gap_max_qubits: Optional[int] = None,
) -> LchInstance:
    """Kitaev-style reduction H = H_in + H_out + H_clock + H_prop.

    q is set to 2 (T+1)^3 m; the instance constructor rejects p with 2^p <= q.
    """
    T = v.T
    n_data = v.n_total
    clock = [n_data + i for i in range(T + 1)]
    n = n_data + T + 1

    h_in = [_basis_term([a, clock[0]], "10", f"in:{a}") for a in range(v.n_witness, n_data)]
    if T >= 1:
        h_out = [_basis_term([v.output, clock[T - 1]], "01", "out")]
    else:
        h_out = [_basis_term([v.output, clock[0]], "00", "out")]
    h_clock = [_basis_term([clock[i], clock[i + 1]], "01", f"clock:{i}") for i in range(T)]
    h_clock.append(_basis_term([clock[T]], "1", "clock:sentinel"))
    h_prop = [term for t in range(1, T + 1) for term in _propagation_terms(v, t, clock)]

    terms = h_in + h_out + h_clock + h_prop
    q = 2 * (T + 1) ** 3 * len(terms)
    metadata: Dict[str, object] = {
        "T": T,
        "data_qubits": n_data,
        "clock_qubits": T + 1,
        "output": v.output,
        "term_counts": {"in": len(h_in), "out": len(h_out), "clock": len(h_clock), "prop": len(h_prop)},
    }
    inst = LchInstance(n=n, terms=tuple(terms), p=p, q=q, metadata=metadata)

    limit = Config.EXPERIMENT.gap_max_qubits if gap_max_qubits is None else gap_max_qubits
    if n <= limit:
        lowest = spectrum(inst, 2)
        metadata["ground_energy"] = float(lowest[0])
        metadata["spectral_gap"] = float(lowest[1] - lowest[0]) if len(lowest) > 1 else None
    else:
        logger.warning(f"Skipping spectral gap computation: {n} qubits exceeds {limit}")
    logger.info(f"Compiled T={T} circuit into {inst.m} terms on {n} qubits (q={q})")
    return inst


def history_state(v: VerificationCircuit, witness: DenseState) -> DenseState:
    """(T+1)^(-1/2) sum_t U_t..U_1 |witness, 0..0> (x) |1^t 0^(T+1-t)>."""
    T = v.T
    check_cap(v.n_total + T + 1)
    pieces = []
    for t in range(T + 1):
        data = v.run(witness, steps=t)
        clock = DenseState.from_bits("1" * t + "0" * (T + 1 - t))
        pieces.append(np.kron(data.amplitudes, clock.amplitudes))
    return DenseState(v.n_total + T + 1, np.sum(pieces, axis=0) / np.sqrt(T + 1))
