"""Standalone GMW zero-knowledge proof of graph 3-colourability.

Each round the prover shuffles its three colours, commits to every vertex
colour, and opens the two endpoints of one edge the verifier picks.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config.config import Config
from protocol.commitment import Commitment, commit, verify_open

logger = logging.getLogger(__name__)

COLOURS = 3

Edge = Tuple[int, int]


@dataclass(frozen=True)
class Graph:
    vertices: int
    edges: Tuple[Edge, ...]

    def __post_init__(self):
        for a, b in self.edges:
            if not (0 <= a < self.vertices and 0 <= b < self.vertices) or a == b:
                raise ValueError(f"bad edge ({a}, {b}) for {self.vertices} vertices")


def complete_graph(v: int) -> Graph:
    return Graph(v, tuple(itertools.combinations(range(v), 2)))


def is_proper_coloring(graph: Graph, colouring: List[int]) -> bool:
    return len(colouring) == graph.vertices and all(colouring[a] != colouring[b] for a, b in graph.edges)


def greedy_coloring(graph: Graph) -> List[int]:
    """First-fit colouring clamped to three colours; improper when the graph needs more."""
    colouring: List[int] = []
    for v in range(graph.vertices):
        earlier = [a if b == v else b for a, b in graph.edges if v in (a, b)]
        used = {colouring[u] for u in earlier if u < v}
        free = [c for c in range(COLOURS) if c not in used]
        colouring.append(free[0] if free else 0)
    return colouring


def gmw_round(graph: Graph, colouring: List[int], rng: np.random.Generator, backend: Optional[str] = None) -> bool:
    """One commit/challenge/open round; True when the verifier is satisfied."""
    shuffle = [int(c) for c in rng.permutation(COLOURS)]
    hidden = [shuffle[c] for c in colouring]
    salts = [rng.bytes(Config.salt_bytes()) for _ in hidden]
    commitments: List[Commitment] = [commit(str(c).encode(), s, backend) for c, s in zip(hidden, salts)]

    a, b = graph.edges[int(rng.integers(len(graph.edges)))]

    opened = all(verify_open(commitments[v], str(hidden[v]).encode(), salts[v]) for v in (a, b))
    return opened and hidden[a] != hidden[b]


def run_gmw(
    graph: Graph,
    colouring: List[int],
    rounds: int,
    rng: np.random.Generator,
    backend: Optional[str] = None,
) -> Dict[str, Any]:
    if not graph.edges:
        raise ValueError("graph has no edges to challenge")
    passed = sum(gmw_round(graph, colouring, rng, backend) for _ in range(rounds))
    report = {
        "rounds": rounds,
        "passed": passed,
        "caught_rate": (rounds - passed) / rounds if rounds else 0.0,
        "honest": is_proper_coloring(graph, colouring),
    }
    logger.info(f"GMW on {graph.vertices} vertices: {passed}/{rounds} rounds passed")
    return report
