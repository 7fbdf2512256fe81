"""Subcommands: compile, run, attack, analyze, selftest.

Every command is seeded by --seed through numpy's default PCG64 generator,
so a fixed command line reproduces its output byte for byte.
"""
import argparse
import json
import logging
import sys
import traceback
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from analysis.reports import compare_real_vs_simulated, compare_transcript_sets
from analysis.simulator import SimulatorConfig
from cli.selftest import run_selftest
from config.config import Config
from config.logging_config import setup_logging
from lch.compiler import compile_circuit
from lch.model import InstanceError, LchInstance, load_circuit, load_instance, save_instance
from lch.oracles import ground_state
from protocol.commitment import BACKENDS, CommitmentError
from protocol.machines import AdversaryConfig
from protocol.messages import ProtocolError, Transcript
from protocol.session import exact_accept_probability, run_session
from qsim.dense import CapExceededError, DenseState
from qsim.pauli import DimensionError
from sampler.attacks import estimate_beta, run_attack_experiment
from steane.code import SteaneCode, min_distance

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3

USAGE_ERRORS = (InstanceError, DimensionError, CapExceededError, CommitmentError, ProtocolError, ValueError, OSError)


class UsageError(ValueError):
    """Flag combination the command cannot honour."""


def parse_witness(spec: str, inst: LchInstance) -> Optional[DenseState]:
    """none | ground | bits:<b0b1...>"""
    if spec == "none":
        return None
    if spec == "ground":
        return ground_state(inst)
    if spec.startswith("bits:"):
        bits = spec[len("bits:") :]
        if len(bits) != inst.n or set(bits) - {"0", "1"}:
            raise UsageError(f"witness bits must be {inst.n} binary digits")
        return DenseState.from_bits(bits)
    raise UsageError(f"unknown witness {spec!r} (none | ground | bits:<b>)")


def _write_json(data: Dict[str, Any], output: Optional[str]) -> None:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_compile(args: argparse.Namespace) -> int:
    inst = compile_circuit(load_circuit(args.circuit), args.p)
    save_instance(inst, args.output)
    print(f"{inst.m} terms on {inst.n} qubits; counts {inst.metadata['term_counts']}")
    if inst.metadata.get("spectral_gap") is not None:
        print(f"ground energy {inst.metadata['ground_energy']:.6g}, gap {inst.metadata['spectral_gap']:.6g}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    witness = parse_witness(args.witness, inst)
    adversary = AdversaryConfig.parse(args.adversary)
    if args.exact:
        if not adversary.is_honest:
            raise UsageError("--exact covers honest parties only")
        _write_json({"accept_probability": exact_accept_probability(inst, witness)}, args.output)
        return EXIT_OK
    if args.export_secrets and not args.output:
        raise UsageError("--export-secrets needs --output")

    rng = np.random.default_rng(args.seed)
    transcript, prover = run_session(
        inst,
        witness,
        adversary,
        t_level=args.t_level,
        rng=rng,
        backend=args.backend,
        use_coin_flip=not args.no_coin_flip,
    )
    if args.output:
        transcript.save(args.output)
    else:
        sys.stdout.write(transcript.to_jsonl())
    if args.export_secrets:
        Path(f"{args.output}.key.json").write_text(json.dumps(prover.key.to_json(), indent=2, sort_keys=True) + "\n")
        logger.warning(f"Exported the encoding key next to {args.output}")
    logger.info(f"Verdict: {transcript.verdict}")
    return EXIT_OK if transcript.accepted else EXIT_REJECT


def cmd_attack(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    witness = parse_witness(args.witness, inst)
    if witness is None:
        raise UsageError("the attack experiment needs a witness (ground | bits:<b>)")
    adversary = AdversaryConfig.parse(args.adversary)
    if adversary.kind != "xor":
        raise UsageError("attack takes an xor:<spec> adversary")
    term = inst.term(args.term)
    t_level = Config.PROTOCOL.t_level if args.t_level is None else args.t_level
    report = run_attack_experiment(
        witness, term, adversary, t_level=t_level, samples=args.samples, seed=args.seed, workers=args.workers
    )
    data = report.to_json()
    K = min_distance(SteaneCode.level(t_level))
    if adversary.positions and len(adversary.positions) < K:
        N = 7**t_level
        v = adversary.mask(2 * term.k * N, np.random.default_rng(args.seed))
        data["beta"] = estimate_beta(v, term.k, N, report.samples, np.random.default_rng(args.seed), term.clifford)
    data["K"] = K
    _write_json(data, args.output)
    return EXIT_OK


def _load_transcripts(folder: str) -> List[Transcript]:
    paths = sorted(Path(folder).glob("*.jsonl"))
    if not paths:
        raise UsageError(f"no *.jsonl transcripts in {folder}")
    return [Transcript.load(p) for p in paths]


def cmd_analyze(args: argparse.Namespace) -> int:
    if args.real or args.simulated:
        if not (args.real and args.simulated):
            raise UsageError("--real and --simulated go together")
        report = compare_transcript_sets(_load_transcripts(args.real), _load_transcripts(args.simulated))
    else:
        if not args.instance:
            raise UsageError("analyze needs an instance or --real/--simulated transcript folders")
        inst = load_instance(args.instance)
        witness = parse_witness(args.witness, inst)
        cfg = SimulatorConfig(
            inst,
            AdversaryConfig.parse(args.adversary),
            samples=args.samples or Config.EXPERIMENT.samples,
            t_level=args.t_level,
            use_coin_flip=not args.no_coin_flip,
        )
        report = compare_real_vs_simulated(witness, cfg, seed=args.seed, workers=args.workers, backend=args.backend)
    _write_json(report.to_json(), args.output)
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace) -> int:
    return run_selftest(include_slow=args.slow)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zk_lch", description="Zero-knowledge proofs for local Clifford Hamiltonians")
    parser.add_argument("--seed", type=int, default=0, help="64-bit seed for numpy's PCG64 generator")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument(
        "--backend", choices=sorted(BACKENDS), default=None, help="commitment backend (default ZKLCH_COMMIT_BACKEND)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="Reduce a verification circuit to an LCH instance")
    p.add_argument("circuit")
    p.add_argument("--p", type=int, required=True, help="completeness exponent; needs 2^p > q")
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_compile)

    def protocol_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--witness", default="ground", help="none | ground | bits:<b>")
        p.add_argument("--adversary", default="honest", help="honest | xor:w<k> | xor:p<i,j,...> | wrong-term:<j>")
        p.add_argument("--t-level", type=int, choices=(1, 2), default=None)
        p.add_argument("--output", "-o", default=None)

    p = sub.add_parser("run", help="Run one protocol session and write its transcript")
    p.add_argument("instance")
    protocol_flags(p)
    p.add_argument("--exact", action="store_true", help="print the exact honest acceptance probability")
    p.add_argument("--no-coin-flip", action="store_true", help="let the verifier pick r directly")
    p.add_argument("--export-secrets", action="store_true", help="also write the encoding key")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("attack", help="Estimate XOR-attack success against the traps")
    p.add_argument("instance")
    protocol_flags(p)
    p.add_argument("--term", type=int, default=1, help="1-based term index")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("analyze", help="Compare real and simulated transcript statistics")
    p.add_argument("instance", nargs="?")
    protocol_flags(p)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--no-coin-flip", action="store_true")
    p.add_argument("--real", default=None, help="folder of real transcripts")
    p.add_argument("--simulated", default=None, help="folder of simulated transcripts")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("selftest", help="Run the test suite")
    p.add_argument("--slow", action="store_true", help="include Monte Carlo tests")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)
    try:
        return args.func(args)
    except USAGE_ERRORS as e:
        logger.error(f"{args.command}: {e}")
        logger.debug(traceback.format_exc())
        return EXIT_USAGE
    except Exception as e:
        logger.error(f"{args.command} failed: {e}")
        logger.debug(traceback.format_exc())
        return EXIT_INTERNAL
