"""Brute-force oracles for fault-tolerant stretch and connectivity certificates.

These are written against the definitions only, independent of any
construction code, so they can gate every builder. Exhaustive protection
of an edge (u,v) under fault budget f and stretch step i means: for every
fault set F avoiding u,v with |F| <= f, the u-v distance in h minus F is
at most (2i-1) * w(u,v).

Enumeration shortcut: faulting a vertex never shortens distances, and a
vertex on no u-v path of length <= bound can never matter, so it suffices
to enumerate maximum-size fault sets inside the set of "relevant"
vertices (those with d(u,x) + d(x,v) <= bound). Soundness of this
shortcut is cross-checked in the tests against a literal re-implementation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from heapq import heappop, heappush
from itertools import combinations
from math import comb

from ftspanner.graphs import Graph
from ftspanner.rng import substream

INF = math.inf

DEFAULT_CAP = 10_000_000


class BudgetExceeded(RuntimeError):
    """Raised when exhaustive enumeration would exceed the fault-set cap;
    callers should fall back to sampled mode."""


def _subgraph_adj(g: Graph, edge_ids) -> list[list[tuple[int, int]]]:
    adj: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    for eid in edge_ids:
        u, v, w = g.edges[eid]
        adj[u].append((v, w))
        adj[v].append((u, w))
    return adj


def _normalize_subgraph(g: Graph, h) -> set[int]:
    """Return h as a set of g edge ids; reject anything not a subgraph of g."""
    if isinstance(h, Graph):
        ids = set()
        for u, v, w in h.edges:
            eid = g.edge_id(u, v)
            if eid is None or g.weight(eid) != w:
                raise ValueError(f"subgraph edge ({u},{v},{w}) does not appear in the host graph")
            ids.add(eid)
        return ids
    ids = set(int(e) for e in h)
    for eid in ids:
        if not (0 <= eid < g.m):
            raise ValueError(f"edge id {eid} out of range")
    return ids


def _sssp_upto(adj, src: int, dead: frozenset, cutoff) -> dict[int, float]:
    """Distances from src not exceeding cutoff, skipping dead vertices."""
    best = {src: 0}
    heap = [(0, src)]
    out: dict[int, float] = {}
    while heap:
        d, x = heappop(heap)
        if x in out:
            continue
        out[x] = d
        for y, w in adj[x]:
            if y in dead or y in out:
                continue
            nd = d + w
            if nd <= cutoff and nd < best.get(y, INF):
                best[y] = nd
                heappush(heap, (nd, y))
    return out


def _dist_avoid(adj, u: int, v: int, dead: frozenset, cutoff=INF) -> float:
    """u-v distance avoiding dead vertices; INF if above cutoff or disconnected."""
    best = {u: 0}
    heap = [(0, u)]
    done = set()
    while heap:
        d, x = heappop(heap)
        if x in done:
            continue
        if x == v:
            return d
        done.add(x)
        for y, w in adj[x]:
            if y in dead or y in done:
                continue
            nd = d + w
            if nd <= cutoff and nd < best.get(y, INF):
                best[y] = nd
                heappush(heap, (nd, y))
    return INF


def _protection_scan(adj, u, v, w, f, i, cap, collect):
    """Core enumeration. Returns (ok, worst_ratio, violations, enumerated)."""
    bound = (2 * i - 1) * w
    du = _sssp_upto(adj, u, frozenset(), bound)
    dv = _sssp_upto(adj, v, frozenset(), bound)
    base = du.get(v, INF)
    violations = []
    if base > bound:
        actual = _dist_avoid(adj, u, v, frozenset())
        violations.append(((), actual, bound))
        return False, (actual / w if actual < INF else INF), violations, 1
    relevant = sorted(x for x, d in du.items()
                      if x != u and x != v and x in dv and d + dv[x] <= bound)
    k_eff = min(f, len(relevant))
    if k_eff == 0:
        return True, base / w, violations, 1
    todo = comb(len(relevant), k_eff)
    if todo > cap:
        raise BudgetExceeded(
            f"{todo} fault sets exceed the cap of {cap}; use sampled mode")
    worst = base / w
    ok = True
    for fault in combinations(relevant, k_eff):
        dead = frozenset(fault)
        d = _dist_avoid(adj, u, v, dead, bound)
        if d > bound:
            actual = _dist_avoid(adj, u, v, dead)
            ok = False
            violations.append((fault, actual, bound))
            worst = max(worst, actual / w if actual < INF else INF)
            if not collect:
                break
        else:
            worst = max(worst, d / w)
    return ok, worst, violations, todo


def is_protected(h: Graph, u: int, v: int, w: int, f: int, i: int,
                 cap: int = DEFAULT_CAP) -> bool:
    """Exhaustively decide protection of the edge (u,v) of weight w in h."""
    if u == v:
        raise ValueError("edge endpoints must differ")
    adj = _subgraph_adj(h, range(h.m))
    ok, _, _, _ = _protection_scan(adj, u, v, w, f, i, cap, collect=False)
    return ok


@dataclass
class VerificationReport:
    mode: str
    f: int
    k: int
    passed: bool = True
    worst_stretch: float = 0.0
    per_edge: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    edges_checked: int = 0
    fault_sets: int = 0

    def to_dict(self):
        def num(x):
            return None if x == INF else x

        return {
            "mode": self.mode,
            "f": self.f,
            "k": self.k,
            "passed": self.passed,
            "worst_stretch": num(self.worst_stretch),
            "edges_checked": self.edges_checked,
            "fault_sets": self.fault_sets,
            "violations": [
                {"edge": list(e), "faults": list(fs), "dist": num(d), "bound": b}
                for (e, fs, d, b) in sorted(self.violations)
            ],
            "per_edge": {str(k): num(v) for k, v in sorted(self.per_edge.items())},
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"


def verify_spanner(g: Graph, h, f: int, k: int, mode: str = "exhaustive",
                   seed=0, cap: int = DEFAULT_CAP) -> VerificationReport:
    """Check the fault-tolerant stretch guarantee of h against g.

    Exhaustive mode checks per-edge protection for every edge of g, which
    is sufficient for the spanner property: a shortest path in g minus F
    is a concatenation of protected edges. Sampled mode ("sampled:N")
    draws N fault sets per edge and N random (u, v, F) triples compared
    against (2k-1) times the distance in g minus F.
    """
    h_ids = _normalize_subgraph(g, h)
    h_adj = _subgraph_adj(g, h_ids)
    report = VerificationReport(mode=mode, f=f, k=k)
    budget = cap

    if mode == "exhaustive":
        for eid, (u, v, w) in enumerate(g.edges):
            report.edges_checked += 1
            if eid in h_ids:
                report.per_edge[eid] = 1.0
                report.worst_stretch = max(report.worst_stretch, 1.0)
                continue
            ok, worst, viols, used = _protection_scan(
                h_adj, u, v, w, f, k, budget, collect=True)
            budget -= used
            if budget < 0:
                raise BudgetExceeded("fault-set cap exhausted; use sampled mode")
            report.fault_sets += used
            report.per_edge[eid] = worst
            report.worst_stretch = max(report.worst_stretch, worst)
            if not ok:
                report.passed = False
                for fault, d, bnd in viols:
                    report.violations.append(((u, v), tuple(fault), d, bnd))
        return report

    if not mode.startswith("sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    n_samples = int(mode.split(":", 1)[1]) if ":" in mode else 64
    rng = substream(seed, "verify", n_samples)
    g_adj = _subgraph_adj(g, range(g.m))
    others = list(range(g.n))
    for eid, (u, v, w) in enumerate(g.edges):
        report.edges_checked += 1
        if eid in h_ids:
            report.per_edge[eid] = 1.0
            continue
        bound = (2 * k - 1) * w
        worst = 0.0
        for _ in range(n_samples):
            pool = [x for x in others if x != u and x != v]
            size = min(f, len(pool))
            fault = frozenset(rng.sample(pool, size)) if size else frozenset()
            d = _dist_avoid(h_adj, u, v, fault)
            report.fault_sets += 1
            worst = max(worst, d / w if d < INF else INF)
            if d > bound:
                report.passed = False
                report.violations.append(((u, v), tuple(sorted(fault)), d, bound))
        report.per_edge[eid] = worst
        report.worst_stretch = max(report.worst_stretch, worst)
    # Random pair triples guard the per-edge reduction.
    for _ in range(n_samples):
        u = rng.randrange(g.n)
        v = rng.randrange(g.n)
        if u == v:
            continue
        pool = [x for x in others if x != u and x != v]
        size = min(f, len(pool))
        fault = frozenset(rng.sample(pool, size)) if size else frozenset()
        dg = _dist_avoid(g_adj, u, v, fault)
        if dg == INF:
            continue
        dh = _dist_avoid(h_adj, u, v, fault)
        report.fault_sets += 1
        if dh > (2 * k - 1) * dg:
            report.passed = False
            report.violations.append(((u, v), tuple(sorted(fault)), dh, (2 * k - 1) * dg))
    return report


# ---------------------------------------------------------------------------
# Connectivity certificates.

def _components(n: int, adj, dead: frozenset) -> list[int]:
    label = [-1] * n
    nxt = 0
    for s in range(n):
        if s in dead or label[s] >= 0:
            continue
        stack = [s]
        label[s] = nxt
        while stack:
            x = stack.pop()
            for y, _ in adj[x]:
                if y in dead or label[y] >= 0:
                    continue
                label[y] = nxt
                stack.append(y)
        nxt += 1
    return label


@dataclass
class CertificateReport:
    mode: str
    lam: int
    passed: bool = True
    fault_sets: int = 0
    mismatches: list = field(default_factory=list)

    def to_dict(self):
        return {
            "mode": self.mode,
            "lambda": self.lam,
            "passed": self.passed,
            "fault_sets": self.fault_sets,
            "mismatches": [
                {"faults": list(fs), "edge": list(e)} for fs, e in self.mismatches[:50]
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"


def verify_certificate(g: Graph, h, lam: int, cap: int = DEFAULT_CAP,
                       seed=0, samples: int = 2000) -> CertificateReport:
    """Check that h preserves pairwise connectivity of g under every fault
    set of size < lam.

    Since h is a subgraph, its components refine g's; equality holds iff
    no surviving g edge crosses two h components. Enumeration is over all
    fault sets of size 0..lam-1; if that exceeds the cap, falls back to
    a seeded sample (mode tag "sampled:N").
    """
    if lam < 1:
        raise ValueError("lambda must be >= 1")
    h_ids = _normalize_subgraph(g, h)
    h_adj = _subgraph_adj(g, h_ids)
    total = sum(comb(g.n, j) for j in range(lam))
    if total <= cap:
        fault_sets = (fs for j in range(lam) for fs in combinations(range(g.n), j))
        report = CertificateReport(mode="exhaustive", lam=lam)
    else:
        rng = substream(seed, "cert", lam)
        def sampler():
            for _ in range(samples):
                size = rng.randrange(lam)
                yield tuple(sorted(rng.sample(range(g.n), size)))
        fault_sets = sampler()
        report = CertificateReport(mode=f"sampled:{samples}", lam=lam)
    for fs in fault_sets:
        dead = frozenset(fs)
        report.fault_sets += 1
        label = _components(g.n, h_adj, dead)
        for u, v, _ in g.edges:
            if u in dead or v in dead:
                continue
            if label[u] != label[v]:
                report.passed = False
                report.mismatches.append((fs, (u, v)))
                break
    return report
