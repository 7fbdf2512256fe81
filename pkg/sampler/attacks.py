"""XOR attacks on the reported outcome string, trap strings for a Clifford, and the attack bound."""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from config.config import Config
from encoding.encoder import EncodedWitness, encode_honest
from encoding.key import TRAP_SYMBOLS, EncodingKey, level_for, sample_key
from lch.model import LchTerm
from protocol.machines import AdversaryConfig
from protocol.predicates import eval_R
from qsim.circuit import CliffordCircuit, conjugate_pauli
from qsim.dense import DenseState
from qsim.pauli import DimensionError, PauliString
from sampler.challenge import honest_unpadded_outcome, trap_support_shift
from steane.code import NotACodewordError, SteaneCode, logical_decode, min_distance, xor_bits

logger = logging.getLogger(__name__)

_EIGENSTATE = {"I": "0", "Z": "0", "X": "+", "Y": "r"}


@dataclass
class AttackReport:
    v: str
    samples: int
    q_hat: float
    ci95: float
    bound: Optional[float] = None

    def to_json(self) -> Dict[str, Any]:
        return asdict(self)


def _ci95(q: float, samples: int) -> float:
    return 1.96 * math.sqrt(q * (1 - q) / samples) if samples else 0.0


def xor_attack_run(enc: EncodedWitness, term: LchTerm, key: EncodingKey, v: str, rng: np.random.Generator) -> int:
    """Honest measurement without the pad, masked by v, fed to R."""
    w = honest_unpadded_outcome(enc, term, key, rng)
    if len(v) != len(w):
        raise DimensionError(f"mask of length {len(v)}, outcome of length {len(w)}")
    return int(eval_R(term, key.traps, key.perm, xor_bits(w, v), key.N))


def attack_bound(k: int, K: int) -> float:
    """(1 - 3^-(k+1))^(K/k): chance a mask of weight >= K survives the traps."""
    if k < 1:
        raise ValueError("k must be positive")
    return (1 - 3.0 ** -(k + 1)) ** (K / k)


def trap_string(c: CliffordCircuit, j: int) -> str:
    """Trap symbols t with qubit j of C|t> in a standard basis state."""
    if not 0 <= j < c.n:
        raise IndexError(f"qubit {j} outside a {c.n}-qubit circuit")
    pulled = conjugate_pauli(c.inverse(), PauliString.single(c.n, j, "Z"))
    return "".join(_EIGENSTATE[pulled.letter(m)] for m in range(c.n))


def masks_survive(v: str, perm: List[int], traps: List[str], c: CliffordCircuit, code: SteaneCode) -> bool:
    """Whether v leaves R unchanged on every honest outcome for this (perm, traps).

    ``traps[m]`` holds block m's N trap symbols. Code masks must lie in D^0 and
    each trap column mask in the linear part of that column's support.
    """
    N = code.N
    width = 2 * N
    k = len(traps)
    plain = ["".join(v[m * width + perm[j]] for j in range(width)) for m in range(k)]
    for block in plain:
        try:
            if logical_decode(block[:N], code) != 0:
                return False
        except NotACodewordError:
            return False
    for j in range(N):
        column = "".join(traps[m][j] for m in range(k))
        shift = "".join(plain[m][N + j] for m in range(k))
        if shift not in trap_support_shift(c, column):
            return False
    return True


def estimate_beta(
    v: str,
    k: int,
    N: int,
    samples: int,
    rng: np.random.Generator,
    clifford: Optional[CliffordCircuit] = None,
) -> float:
    """Fraction of uniform (perm, traps) under which the mask v goes unnoticed."""
    if len(v) != 2 * k * N:
        raise DimensionError(f"mask of length {len(v)}, expected 2kN = {2 * k * N}")
    if "1" not in v:
        return 1.0
    code = SteaneCode.level(level_for(N))
    c = clifford if clifford is not None else CliffordCircuit.identity(k)
    hits = 0
    for _ in range(samples):
        perm = [int(p) for p in rng.permutation(2 * N)]
        traps = ["".join(TRAP_SYMBOLS[int(s)] for s in rng.integers(3, size=N)) for _ in range(k)]
        hits += masks_survive(v, perm, traps, c, code)
    return hits / samples


def merge_reports(reports: List[AttackReport]) -> AttackReport:
    """Sample-weighted average of reports for the same mask family."""
    total = sum(r.samples for r in reports)
    q = sum(r.q_hat * r.samples for r in reports) / total if total else 0.0
    return AttackReport(reports[0].v, total, q, _ci95(q, total), reports[0].bound)


def run_attack_experiment(
    witness: DenseState,
    term: LchTerm,
    adversary: AdversaryConfig,
    t_level: Optional[int] = None,
    samples: Optional[int] = None,
    seed: int = 0,
    workers: Optional[int] = None,
) -> AttackReport:
    """Estimate the predicate-1 rate of R under an XOR mask family, fresh key per sample."""
    t_level = Config.PROTOCOL.t_level if t_level is None else t_level
    samples = Config.EXPERIMENT.samples if samples is None else samples
    workers = max(1, min(Config.EXPERIMENT.workers if workers is None else workers, samples or 1))
    N = 7**t_level
    K = min_distance(SteaneCode.level(t_level))
    weight = len(adversary.positions) if adversary.positions else adversary.weight
    bound = attack_bound(term.k, K) if adversary.kind == "xor" and weight >= K else None
    shares = [samples // workers + (1 if w < samples % workers else 0) for w in range(workers)]
    children = np.random.SeedSequence(seed).spawn(workers)

    def work(w: int) -> AttackReport:
        rng = np.random.default_rng(children[w])
        ones = 0
        for _ in range(shares[w]):
            key = sample_key(witness.k, N, rng)
            v = adversary.mask(2 * term.k * N, rng)
            ones += xor_attack_run(encode_honest(witness, key), term, key, v, rng)
        q = ones / shares[w] if shares[w] else 0.0
        return AttackReport(adversary.spec, shares[w], q, _ci95(q, shares[w]), bound)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        report = merge_reports(list(pool.map(work, range(workers))))
    logger.info(f"Attack {report.v}: q_hat={report.q_hat:.4f} +/- {report.ci95:.4f} over {report.samples} samples")
    return report
