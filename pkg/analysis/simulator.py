"""Zero-knowledge simulator.

The simulator learns the challenge before it prepares anything, encodes a
state built to pass that one challenge, and commits to a fixed key tuple it
cannot open. It never sees a witness.
"""
import copy
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from config.config import Config
from encoding.key import EncodingKey
from lch.model import LchInstance
from protocol.coin_flip import combine, random_bits, select_term
from protocol.commitment import Commitment, commit
from protocol.machines import AdversaryConfig, ProverMachine, VerifierMachine
from protocol.messages import Transcript
from protocol.npzk import NpzkFunctionality
from protocol.session import execute, party_rngs
from protocol.transport import Transport, duplex
from qsim.dense import DenseState, dense_apply

logger = logging.getLogger(__name__)


def prepare_rho_r(inst: LchInstance, j: int) -> DenseState:
    """Support qubits in C_j^dagger |1 0...0>, every other qubit |0>; passes term j with certainty."""
    term = inst.term(j)
    local = dense_apply(DenseState.from_bits("1" + "0" * (term.k - 1)), term.clifford.inverse())
    full = local.tensor(DenseState.zero(inst.n - term.k)) if inst.n > term.k else local
    order = list(term.support) + [q for q in range(inst.n) if q not in term.support]
    tensor = np.moveaxis(full.amplitudes.reshape([2] * inst.n), list(range(inst.n)), order)
    return DenseState(inst.n, tensor.reshape(-1))


@dataclass
class SimulatorConfig:
    instance: LchInstance
    adversary: AdversaryConfig = field(default_factory=AdversaryConfig)
    samples: int = 1
    t_level: Optional[int] = None
    use_coin_flip: Optional[bool] = None

    def __post_init__(self):
        if self.adversary.kind not in ("honest", "xor", "wrong-term"):
            raise ValueError(f"unsupported adversary {self.adversary.kind!r}")
        if self.use_coin_flip is None:
            self.use_coin_flip = Config.PROTOCOL.use_coin_flip


class SimulatedProver(ProverMachine):
    """Prover that reads the verifier's next coins and steers r to a challenge it has prepared for."""

    def __init__(
        self,
        endpoint: Transport,
        inst: LchInstance,
        rng: np.random.Generator,
        verifier: VerifierMachine,
        use_coin_flip: bool,
        t_level: Optional[int] = None,
        npzk: Optional[NpzkFunctionality] = None,
    ):
        super().__init__(endpoint, inst, None, rng, t_level=t_level, npzk=npzk or NpzkFunctionality("simulated"))
        self._verifier = verifier
        self._use_coin_flip = use_coin_flip
        self._y: Optional[str] = None

    def _peek(self, length: int) -> str:
        # rewind: the verifier's next draw, taken from a copy of its generator
        return random_bits(length, copy.deepcopy(self._verifier.rng))

    def logical_state(self) -> DenseState:
        peeked = self._peek(self.challenge_bits)
        if self._use_coin_flip:
            target = random_bits(self.challenge_bits, self.rng)
            self._y = combine(target, peeked)
        else:
            target = peeked
        return prepare_rho_r(self.inst, select_term(target, self.inst.m))

    def commit_key(self, key: EncodingKey) -> Commitment:
        fixed = EncodingKey.trivial(key.n, key.N)
        return commit(fixed.commitment_message(), key.salt, "transparent")

    def coin_bits(self) -> str:
        return self._y


def zk_simulate(cfg: SimulatorConfig, rng: np.random.Generator) -> Transcript:
    """One simulated transcript against the configured verifier."""
    prover_rng, verifier_rng = party_rngs(rng)
    transcript = Transcript()
    prover_end, verifier_end = duplex(transcript)
    npzk = NpzkFunctionality("simulated")
    verifier = VerifierMachine(verifier_end, cfg.instance, verifier_rng, cfg.adversary, npzk=npzk)
    prover = SimulatedProver(prover_end, cfg.instance, prover_rng, verifier, cfg.use_coin_flip, cfg.t_level, npzk)
    execute(prover, verifier, cfg.use_coin_flip)
    return transcript


def simulate_many(cfg: SimulatorConfig, seed: int = 0, workers: Optional[int] = None) -> List[Transcript]:
    """``cfg.samples`` simulated transcripts, seeded per worker like run_many."""
    workers = max(1, min(Config.EXPERIMENT.workers if workers is None else workers, cfg.samples or 1))
    shares = [cfg.samples // workers + (1 if w < cfg.samples % workers else 0) for w in range(workers)]
    children = np.random.SeedSequence(seed).spawn(workers)

    def work(w: int) -> List[Transcript]:
        rng = np.random.default_rng(children[w])
        return [zk_simulate(cfg, rng) for _ in range(shares[w])]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(work, range(workers)))
    transcripts = [t for chunk in results for t in chunk]
    logger.info(f"Simulated {len(transcripts)} transcript(s): {sum(t.accepted for t in transcripts)} accepted")
    return transcripts
