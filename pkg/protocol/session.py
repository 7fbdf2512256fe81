"""One protocol session: wiring, execution, exact acceptance, and batched runs."""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple, Union

import numpy as np

from config.config import Config
from lch.model import LchInstance
from protocol.coin_flip import challenge_length, select_term
from protocol.machines import AdversaryConfig, ProverMachine, VerifierMachine
from protocol.messages import ProtocolError, Transcript
from protocol.npzk import NpzkFunctionality
from protocol.transport import duplex
from qsim.dense import DenseOperator, DenseState
from sampler.challenge import acceptance_probability

logger = logging.getLogger(__name__)


def party_rngs(rng: np.random.Generator) -> Tuple[np.random.Generator, np.random.Generator]:
    """Independent (prover, verifier) generators drawn from one session generator."""
    seeds = rng.integers(0, 2**62, size=2)
    return np.random.default_rng(int(seeds[0])), np.random.default_rng(int(seeds[1]))


def execute(prover: ProverMachine, verifier: VerifierMachine, use_coin_flip: Optional[bool] = None) -> str:
    """Drive both machines through one execution and return the verdict.

    Any ProtocolError ends the session with a reject verdict.
    """
    use_coin_flip = Config.PROTOCOL.use_coin_flip if use_coin_flip is None else use_coin_flip
    try:
        verifier.receive_witness(prover.send_witness())
        if use_coin_flip:
            prover.coin_commit()
            verifier.coin_challenge()
            prover.coin_reveal()
            verifier.coin_check()
        else:
            verifier.choose_challenge()
            prover.receive_challenge()
        verifier.challenge()
        prover.respond()
        return verifier.decide()
    except ProtocolError as e:
        logger.warning(f"Protocol error, rejecting: {e}")
        return verifier.reject("protocol-error")


def run_session(
    inst: LchInstance,
    witness: Optional[DenseState] = None,
    adversary: Optional[AdversaryConfig] = None,
    t_level: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    backend: Optional[str] = None,
    use_coin_flip: Optional[bool] = None,
) -> Tuple[Transcript, ProverMachine]:
    """Like run_protocol, but also hands back the prover (and with it the key)."""
    rng = rng if rng is not None else np.random.default_rng()
    prover_rng, verifier_rng = party_rngs(rng)
    transcript = Transcript()
    prover_end, verifier_end = duplex(transcript)
    npzk = NpzkFunctionality()
    prover = ProverMachine(prover_end, inst, witness, prover_rng, t_level=t_level, backend=backend, npzk=npzk)
    verifier = VerifierMachine(verifier_end, inst, verifier_rng, adversary, npzk=npzk)
    verdict = execute(prover, verifier, use_coin_flip)
    logger.debug(f"Session finished: {verdict} ({len(transcript.messages)} messages)")
    return transcript, prover


def run_protocol(
    inst: LchInstance,
    witness: Optional[DenseState] = None,
    adversary: Optional[AdversaryConfig] = None,
    t_level: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    backend: Optional[str] = None,
    use_coin_flip: Optional[bool] = None,
) -> Transcript:
    """Run the full proof system once and return its transcript."""
    return run_session(inst, witness, adversary, t_level, rng, backend, use_coin_flip)[0]


def exact_accept_probability(inst: LchInstance, witness: Optional[Union[DenseState, DenseOperator]] = None) -> float:
    """Honest-party acceptance probability, averaged over every challenge string.

    Without a witness the prover's random basis state averages to I / 2^n.
    """
    rho = witness if witness is not None else DenseOperator.maximally_mixed(inst.n)
    bits = challenge_length(inst.m)
    strings = [format(i, f"0{bits}b") if bits else "" for i in range(2**bits)]
    probs = [acceptance_probability(inst, rho, select_term(r, inst.m)) for r in strings]
    return float(np.mean(probs))


def run_many(
    inst: LchInstance,
    witness: Optional[DenseState] = None,
    adversary: Optional[AdversaryConfig] = None,
    samples: Optional[int] = None,
    seed: int = 0,
    workers: Optional[int] = None,
    **kwargs,
) -> List[Transcript]:
    """``samples`` independent sessions split across a worker pool.

    Worker w draws its sessions from SeedSequence(seed).spawn(workers)[w];
    transcripts come back in worker order, so the result depends only on
    (seed, workers, samples).
    """
    samples = Config.EXPERIMENT.samples if samples is None else samples
    workers = max(1, min(Config.EXPERIMENT.workers if workers is None else workers, samples or 1))
    shares = [samples // workers + (1 if w < samples % workers else 0) for w in range(workers)]
    children = np.random.SeedSequence(seed).spawn(workers)

    def work(w: int) -> List[Transcript]:
        rng = np.random.default_rng(children[w])
        return [run_protocol(inst, witness, adversary, rng=rng, **kwargs) for _ in range(shares[w])]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(work, range(workers)))
    transcripts = [t for chunk in results for t in chunk]
    accepted = sum(t.accepted for t in transcripts)
    logger.info(f"Ran {len(transcripts)} session(s): {accepted} accepted")
    return transcripts
