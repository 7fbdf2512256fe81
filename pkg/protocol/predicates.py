"""The prover's consistency predicates R and Q on a claimed outcome string."""
import logging
from typing import List, Sequence, Tuple

from encoding.key import EncodingKey, level_for
from lch.model import LchTerm
from qsim.pauli import DimensionError
from sampler.challenge import column_distribution, pad_shift, support_pad
from steane.code import NotACodewordError, SteaneCode, logical_decode, xor_bits

logger = logging.getLogger(__name__)

AMPLITUDE_TOLERANCE = 1e-12


def split_blocks(u: str, perm: Sequence[int], k: int, N: int) -> List[Tuple[str, str]]:
    """Per support block, (code string y, trap string z) with perm(y || z) = u_i."""
    width = 2 * N
    if len(u) != k * width:
        raise DimensionError(f"|u| = {len(u)}, expected 2kN = {k * width}")
    out = []
    for m in range(k):
        block = u[m * width : (m + 1) * width]
        plain = "".join(block[perm[j]] for j in range(width))
        out.append((plain[:N], plain[N:]))
    return out


def eval_R(term: LchTerm, traps: str, perm: Sequence[int], u: str, N: int) -> bool:
    """R_r: every code string decodes, one of them to 1, and every trap column is possible.

    ``traps`` is the register-wide trap string; the support blocks are read from it.
    """
    code = SteaneCode.level(level_for(N))
    blocks = split_blocks(u, perm, term.k, N)
    try:
        logical = [logical_decode(y, code) for y, _ in blocks]
    except NotACodewordError:
        return False
    if not any(logical):
        return False
    for j in range(N):
        column = "".join(traps[blk * N + j] for blk in term.support)
        observed = "".join(z[j] for _, z in blocks)
        if column_distribution(term.clifford, column)[int(observed, 2)] <= AMPLITUDE_TOLERANCE:
            return False
    return True


def eval_Q(term: LchTerm, key: EncodingKey, u: str) -> bool:
    """Q_r = R_r evaluated on u with the conjugated pad's X part removed."""
    c, _, _ = pad_shift(term.clifford, term.support, key.a, key.b, key.N)
    return eval_R(term, key.traps, key.perm, xor_bits(u, support_pad(key, term.support, c)), key.N)
