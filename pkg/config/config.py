import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv()


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    return int(value) if value not in (None, "") else default


def _env_flag(name: str) -> bool:
    return os.getenv(name, "").strip().lower() in ("1", "true", "yes", "on")


@dataclass(frozen=True)
class DenseConfig:
    cap: int = 20  # largest register the dense backend will allocate


@dataclass(frozen=True)
class StabilizerConfig:
    max_qubits: int = 512


@dataclass(frozen=True)
class CodeConfig:
    protocol_level: int = 2
    toy_level: int = 1


@dataclass(frozen=True)
class CommitmentConfig:
    security_bits: int = 128
    backend: str = "hash"

    @property
    def salt_bytes(self) -> int:
        return self.security_bits // 8


@dataclass(frozen=True)
class ProtocolConfig:
    t_level: int = 2
    use_coin_flip: bool = True
    locality: int = 5


@dataclass(frozen=True)
class ExperimentConfig:
    samples: int = 10_000
    workers: int = 4
    random_clifford_word_length: int = 40
    gap_max_qubits: int = 10


@dataclass(frozen=True)
class LoggingConfig:
    level: str = "INFO"


class Config:
    # Dense simulation
    DENSE = DenseConfig(cap=_env_int("ZKLCH_DENSE_CAP", 20))
    STABILIZER = StabilizerConfig(max_qubits=_env_int("ZKLCH_TABLEAU_MAX_QUBITS", 512))

    # Concatenated Steane code: level 2 (N = 49) for experiments, level 1 (N = 7) toy mode
    CODE = CodeConfig()

    COMMITMENT = CommitmentConfig(
        security_bits=_env_int("ZKLCH_SECURITY_BITS", 128),
        backend=os.getenv("ZKLCH_COMMIT_BACKEND", "hash"),
    )

    PROTOCOL = ProtocolConfig(
        t_level=_env_int("ZKLCH_T_LEVEL", 2),
        use_coin_flip=not _env_flag("ZKLCH_SKIP_COIN_FLIP"),
    )

    EXPERIMENT = ExperimentConfig(
        samples=_env_int("ZKLCH_SAMPLES", 10_000),
        workers=_env_int("ZKLCH_WORKERS", 4),
    )

    LOGGING = LoggingConfig(level=os.getenv("ZKLCH_LOG_LEVEL", "INFO"))

    @classmethod
    def dense_cap(cls) -> int:
        return cls.DENSE.cap

    @classmethod
    def salt_bytes(cls) -> int:
        return cls.COMMITMENT.salt_bytes
