"""Classical transcript statistics and real-vs-simulated distance reports."""
import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import pandas as pd

from analysis.simulator import SimulatorConfig, simulate_many
from protocol.messages import ABORT, NPZK, OUTCOME_U, Transcript
from protocol.session import run_many
from qsim.dense import DenseState

logger = logging.getLogger(__name__)

FEATURES = ("r", "response", "verdict")


def transcript_features(transcript: Transcript) -> Dict[str, str]:
    """Challenge string, the prover's response kind, and the verdict."""
    outcome = transcript.find(OUTCOME_U)
    if transcript.find(NPZK) is not None:
        response = "npzk"
    elif transcript.find(ABORT) is not None:
        response = "abort"
    else:
        response = "none"
    return {
        "r": outcome.payload.get("r", "") if outcome is not None else "",
        "response": response,
        "verdict": transcript.verdict or "none",
    }


def feature_frame(transcripts: Iterable[Transcript]) -> pd.DataFrame:
    return pd.DataFrame([transcript_features(t) for t in transcripts], columns=list(FEATURES))


def histogram(frame: pd.DataFrame, columns: Sequence[str] = FEATURES) -> pd.Series:
    """Empirical distribution over the joint feature key."""
    if frame.empty:
        return pd.Series(dtype=float)
    keys = frame[list(columns)].astype(str).agg("|".join, axis=1)
    return keys.value_counts(normalize=True).sort_index()


def total_variation(p: pd.Series, q: pd.Series) -> float:
    """Half the L1 distance between two histograms over the union of their keys."""
    joined = pd.concat([p.rename("p"), q.rename("q")], axis=1).fillna(0.0)
    return float(0.5 * (joined["p"] - joined["q"]).abs().sum())


@dataclass
class DistributionReport:
    real: Dict[str, float]
    simulated: Dict[str, float]
    tv: float
    samples: int

    def to_json(self) -> Dict[str, Any]:
        return asdict(self)

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n")


def compare_transcript_sets(
    real: List[Transcript], simulated: List[Transcript], columns: Sequence[str] = FEATURES
) -> DistributionReport:
    p = histogram(feature_frame(real), columns)
    q = histogram(feature_frame(simulated), columns)
    tv = total_variation(p, q)
    return DistributionReport(
        real={str(k): float(v) for k, v in p.items()},
        simulated={str(k): float(v) for k, v in q.items()},
        tv=tv,
        samples=min(len(real), len(simulated)),
    )


def compare_real_vs_simulated(
    witness: DenseState,
    cfg: SimulatorConfig,
    samples: Optional[int] = None,
    seed: int = 0,
    workers: Optional[int] = None,
    backend: Optional[str] = None,
) -> DistributionReport:
    """Run the real protocol with ``witness`` and the simulator under the same verifier.

    ``backend`` picks the commitment scheme of the real sessions; the
    simulator always commits with the transparent backend.
    """
    samples = cfg.samples if samples is None else samples
    real = run_many(
        cfg.instance,
        witness,
        cfg.adversary,
        samples=samples,
        seed=seed,
        workers=workers,
        t_level=cfg.t_level,
        backend=backend,
        use_coin_flip=cfg.use_coin_flip,
    )
    sim_cfg = SimulatorConfig(cfg.instance, cfg.adversary, samples, cfg.t_level, cfg.use_coin_flip)
    # distinct stream for the simulator side
    simulated = simulate_many(sim_cfg, seed=seed + 1, workers=workers)
    report = compare_transcript_sets(real, simulated)
    logger.info(f"Real vs simulated over {samples} sample(s): TV = {report.tv:.4f}")
    return report
