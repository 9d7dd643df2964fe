"""Greedy MIS over path-conflict instances, sequential and round-parallel.

Two paths conflict when their vertex sets intersect. The round algorithm
repeatedly accepts every path that holds the minimum priority on each of
its vertices, then discards the accepted paths' neighbors; its output is
exactly the lexicographic-first MIS under the same priority order. The
conflict graph is never materialized: each round builds a per-vertex
earliest-priority map, so work per round is linear in the surviving
paths' total length.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ftspanner.rng import substream


@dataclass(frozen=True)
class PathConflictInstance:
    """Candidate paths (as vertex sets) plus a priority permutation.

    pi[j] is the rank of path j; ranks form a permutation of
    0..len(paths)-1 and lower rank wins.
    """

    paths: tuple[frozenset[int], ...]
    pi: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.pi) != list(range(len(self.paths))):
            raise ValueError("pi is not a permutation of the path indices")


@dataclass
class MisRoundTrace:
    rounds: int = 0
    work: int = 0
    accepted_per_round: list[list[int]] = field(default_factory=list)


def random_permutation(length: int, seed) -> tuple[int, ...]:
    """Uniform permutation of 0..length-1, deterministic per seed."""
    if length < 0:
        raise ValueError("length must be nonnegative")
    order = list(range(length))
    substream(seed, "perm", length).shuffle(order)
    return tuple(order)


def lex_first_mis(inst: PathConflictInstance) -> set[int]:
    """Reference oracle: scan in rank order, accept whatever is disjoint."""
    taken: set[int] = set()
    used: set[int] = set()
    order = sorted(range(len(inst.paths)), key=lambda j: inst.pi[j])
    for j in order:
        p = inst.paths[j]
        if not (p & used):
            taken.add(j)
            used |= p
    return taken


def parallel_greedy_mis(inst: PathConflictInstance) -> tuple[set[int], MisRoundTrace]:
    """Round-structured MIS; output is identical to lex_first_mis.

    Round body: for every vertex touched by a surviving path, find the
    minimum rank among the paths containing it; accept the paths that
    are the minimum everywhere; remove them and their neighbors.
    """
    paths = inst.paths
    pi = inst.pi
    alive = list(range(len(paths)))
    accepted: set[int] = set()
    trace = MisRoundTrace()
    while alive:
        trace.rounds += 1
        earliest: dict[int, int] = {}
        for j in alive:
            r = pi[j]
            for w in paths[j]:
                prev = earliest.get(w)
                if prev is None or r < prev:
                    earliest[w] = r
            trace.work += len(paths[j])
        batch = [j for j in alive if all(earliest[w] == pi[j] for w in paths[j])]
        accepted.update(batch)
        trace.accepted_per_round.append(sorted(batch))
        blocked: set[int] = set()
        for j in batch:
            blocked |= paths[j]
        batch_set = set(batch)
        nxt = []
        for j in alive:
            if j in batch_set:
                continue
            trace.work += len(paths[j])
            if paths[j].isdisjoint(blocked):
                nxt.append(j)
        alive = nxt
    return accepted, trace
