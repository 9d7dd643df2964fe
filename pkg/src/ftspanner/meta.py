"""k-phase fault-tolerant clustering spanner.

Each phase turns the previous clustering into a sparser one. For every
still-clustered vertex v the phase computes a maximal set of vertex-disjoint
paths from v to distinct previous-level centers (the "fan"), going through
a small random sample of each neighbor's cluster paths. A cleanup step
replaces each new path's suffix with the lightest direct edge from the
path into v, which keeps edge weights strictly increasing toward v. A
p-sample of the centers survives; vertices that still see K_f surviving
heads keep their K_f lightest such paths as the next cluster paths, and
everyone else buys all edges into its fan. Edges heavier than both
endpoints' surviving cluster paths are deferred to the next phase.

The per-vertex steps are pure functions of local data so the distributed
simulation can reuse them verbatim; all randomness flows through
per-(vertex, phase) streams.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from ftspanner.graphs import Graph, Path
from ftspanner.parmis import PathConflictInstance, parallel_greedy_mis
from ftspanner.result import PhaseTrace, SpannerResult, meta_size_bound
from ftspanner.rng import vertex_stream


@dataclass
class FanEntry:
    path: Path            # final (possibly shortcut) path, ends at the owner
    orig: Path            # pre-shortcut path; == path for inherited cluster paths
    src: int | None       # neighbor whose sample supplied it; None if inherited
    sample_idx: int = -1  # position in the neighbor's stored sample list


@dataclass
class PhaseRecord:
    """One phase's inputs and outputs, retained for invariant checking."""
    i: int
    k: int
    f: int
    k_f: int
    centers: frozenset
    clustered: frozenset
    q: dict
    spanner: frozenset
    remaining: frozenset
    prev_centers: frozenset = frozenset()
    prev_clustered: frozenset = frozenset()
    prev_q: dict = field(default_factory=dict)


def sample_fan_paths(qpaths, rng, count: int) -> list[Path]:
    """`count` uniform with-replacement draws, deduplicated in draw order."""
    if len(qpaths) <= 1:
        return list(qpaths)
    seen = set()
    out = []
    for _ in range(count):
        p = qpaths[rng.randrange(len(qpaths))]
        if p.vertices not in seen:
            seen.add(p.vertices)
            out.append(p)
    return out


def shortcut(path: Path, edge_of: dict[int, tuple[int, int]]) -> Path:
    """Replace the suffix by the lightest remaining edge from the path into
    its tail. edge_of maps neighbor -> (w, eid) over the tail's remaining
    incident edges; the path's own last edge is always a candidate."""
    verts = path.vertices
    best = None
    best_idx = -1
    for idx in range(len(verts) - 1):
        hit = edge_of.get(verts[idx])
        if hit is not None and (best is None or hit < best):
            best = hit
            best_idx = idx
    if best_idx == len(verts) - 2:
        return path
    return path.prefix_to(best_idx).extend(verts[-1], best[1], best)


def build_fan(v: int, q_v, inc_v, samples, variant: str = "seq",
              mis_mode: str = "greedy", pi_rng=None) -> list[FanEntry]:
    """Step 1 for a single vertex: maximal disjoint paths to adjacent
    clusters, shortcut, ordered by last-edge key.

    inc_v: remaining incident edges as (w, eid, u), ascending by (w, eid).
    samples: neighbor -> stored sample list (only entries for inc_v
    neighbors are read).
    """
    used = set()
    for p in q_v:
        used |= p.vset
    entries = [FanEntry(p, p, None) for p in q_v]
    edge_of = {u: (w, eid) for (w, eid, u) in inc_v}

    accepted: list[tuple[Path, int, tuple[int, int], int, int]] = []
    if variant == "seq":
        for w, eid, u in inc_v:
            for si, p in enumerate(samples[u]):
                if p.vset.isdisjoint(used):
                    used |= p.vset
                    accepted.append((p, eid, (w, eid), u, si))
                    break
    elif variant == "mod":
        cands = [(p, eid, (w, eid), u, si)
                 for (w, eid, u) in inc_v
                 for si, p in enumerate(samples[u])]
        if mis_mode == "parallel":
            alive = [j for j, c in enumerate(cands) if c[0].vset.isdisjoint(used)]
            order = list(range(len(alive)))
            if pi_rng is not None:
                pi_rng.shuffle(order)
            inst = PathConflictInstance(
                tuple(cands[j][0].vset for j in alive), tuple(order))
            taken, _ = parallel_greedy_mis(inst)
            for t in sorted(taken, key=lambda j: order[j]):
                accepted.append(cands[alive[t]])
                used |= cands[alive[t]][0].vset
        else:
            for c in cands:
                if c[0].vset.isdisjoint(used):
                    used |= c[0].vset
                    accepted.append(c)
    else:
        raise ValueError(f"unknown variant {variant!r}")

    for p, eid, key, u, si in accepted:
        grown = p.extend(v, eid, key)
        entries.append(FanEntry(shortcut(grown, edge_of), grown, u, si))
    entries.sort(key=lambda e: e.path.last_key)
    return entries


def choose_cluster(entries, is_sampled_head, k_f: int):
    """Step 2 for a single vertex. Returns (clustered, q_paths, i_v) with
    i_v the 1-based index of the last fan entry taken (|fan|+1 when the
    vertex drops out)."""
    hits = [j for j, e in enumerate(entries) if is_sampled_head(e)]
    if len(hits) >= k_f:
        chosen = hits[:k_f]
        return True, tuple(entries[j].path for j in chosen), chosen[-1] + 1
    return False, (), len(entries) + 1


def le_edge_ids(entries, i_v: int, inc_v) -> list[int]:
    """Step 3 edge purchases: remaining edges from the owner into the
    pre-shortcut vertices of every fan entry before position i_v."""
    pre: set[int] = set()
    for e in entries[: i_v - 1]:
        pre |= e.orig.vset
    return [eid for (w, eid, u) in inc_v if u in pre]


def _incident_lists(g: Graph):
    return {v: [(w, eid, u) for (w, eid, u) in g.adj[v]] for v in range(g.n)}


def run_phases(g: Graph, f: int, k: int, *, sample_fn, centers_fn,
               variant: str = "seq", c_k: int = 20, mis: str = "greedy",
               pi_rng_fn=None, record_states: bool = False):
    """Shared phase driver. sample_fn(i, u, q_paths) supplies the per-vertex
    sample list; centers_fn(i, centers, fans) picks the surviving centers
    (fans provided for deterministic selection)."""
    n = g.n
    if not (1 <= f < n):
        raise ValueError(f"need 1 <= f < n, got f={f}, n={n}")
    if k < 2:
        raise ValueError(f"need k >= 2, got k={k}")
    k_f = c_k * k * f

    centers = frozenset(range(n))
    clustered = frozenset(range(n))
    q = {v: (Path.trivial(v),) for v in range(n)}
    inc = _incident_lists(g)
    spanner: set[int] = set()
    remaining = frozenset(range(g.m))
    trace: list[PhaseTrace] = []
    states: list[PhaseRecord] = []
    # cutoff indices of clustered vertices, logged per phase; the tail of
    # this distribution is the knob the size argument leans on
    iv_summary: list[dict] = []
    if record_states:
        states.append(PhaseRecord(0, k, f, k_f, centers, clustered, dict(q),
                                  frozenset(), remaining))

    for i in range(1, k + 1):
        t0 = time.perf_counter()
        samples = {u: sample_fn(i, u, q[u]) for u in sorted(clustered)}
        fans = {}
        for v in sorted(clustered):
            pi_rng = pi_rng_fn(i, v) if pi_rng_fn is not None else None
            fans[v] = build_fan(v, q[v], inc[v], samples, variant, mis, pi_rng)
        centers_next = centers_fn(i, centers, fans) if i < k else frozenset()

        new_edges: set[int] = set()
        q_next: dict[int, tuple[Path, ...]] = {}
        clustered_next = set()
        iv_taken: list[int] = []
        for v in sorted(clustered):
            entries = fans[v]
            ok, q_v, i_v = choose_cluster(
                entries, lambda e: e.path.head in centers_next, k_f)
            if ok:
                clustered_next.add(v)
                q_next[v] = q_v
                iv_taken.append(i_v)
            new_edges.update(le_edge_ids(entries, i_v, inc[v]))
        for v in clustered_next:
            for p in q_next[v]:
                new_edges.update(p.edges)
        new_edges -= spanner
        spanner |= new_edges

        thr = {v: max(p.last_key for p in q_next[v]) for v in clustered_next}
        inc_next: dict[int, list] = {v: [] for v in clustered_next}
        rem_next: set[int] = set()
        for v in sorted(clustered_next):
            keep = []
            tv = thr[v]
            for w, eid, u in inc[v]:
                if (u in clustered_next and eid not in spanner
                        and (w, eid) > tv and (w, eid) > thr[u]):
                    keep.append((w, eid, u))
                    rem_next.add(eid)
            inc_next[v] = keep

        trace.append(PhaseTrace(i, len(centers_next), len(clustered_next),
                                len(new_edges), len(rem_next),
                                time.perf_counter() - t0))
        iv_summary.append({
            "phase": i,
            "count": len(iv_taken),
            "max": max(iv_taken, default=0),
            "mean": round(sum(iv_taken) / len(iv_taken), 2) if iv_taken else 0,
        })
        if record_states:
            states.append(PhaseRecord(
                i, k, f, k_f, centers_next, frozenset(clustered_next),
                dict(q_next), frozenset(spanner), frozenset(rem_next),
                prev_centers=centers, prev_clustered=clustered, prev_q=q))
        centers, clustered, q, inc = centers_next, frozenset(clustered_next), q_next, inc_next
        remaining = frozenset(rem_next)

    return spanner, trace, states, iv_summary


def build_ft_spanner(g: Graph, f: int, k: int, seed=0, variant: str = "seq",
                     c_k: int = 20, c_s: int = 4, mis: str = "greedy",
                     record_states: bool = False) -> SpannerResult:
    """Randomized build. variant "seq" scans each remaining edge in weight
    order and takes the first disjoint sampled path of that neighbor;
    variant "mod" scans all sampled paths in one fixed order (or under a
    random permutation when mis="parallel")."""
    n = g.n
    ell = max(1, c_s * math.ceil(math.log2(max(n, 2))))
    p = (f / n) ** (1 / k)

    def sample_fn(i, u, qpaths):
        return sample_fan_paths(qpaths, vertex_stream(seed, "sample", i, u), ell)

    def centers_fn(i, centers, fans):
        return frozenset(
            s for s in centers
            if vertex_stream(seed, "center", i, s).random() < p)

    pi_rng_fn = None
    if variant == "mod" and mis == "parallel":
        pi_rng_fn = lambda i, v: vertex_stream(seed, "pi", i, v)

    spanner, trace, states, iv_summary = run_phases(
        g, f, k, sample_fn=sample_fn, centers_fn=centers_fn, variant=variant,
        c_k=c_k, mis=mis, pi_rng_fn=pi_rng_fn, record_states=record_states)

    algo = "meta-seq" if variant == "seq" else "meta-mod"
    result = SpannerResult(
        algo=algo, n=n, m=g.m, graph_sha=g.sha(),
        params={"f": f, "k": k, "seed": seed, "variant": variant,
                "c_k": c_k, "c_s": c_s, "mis": mis},
        edges=tuple(sorted(spanner)),
        trace=trace,
        extras={"size_bound": meta_size_bound(n, f, k), "k_f": c_k * k * f,
                "iv": iv_summary},
        states=states,
    )
    return result


# ---------------------------------------------------------------------------
# Invariant diagnostics.

def check_invariants(state: PhaseRecord) -> list[str]:
    """Empty unless a structural invariant is broken. The center-count
    balance (an expectation-level property) is reported separately via
    center_ratio(), never as a failure here."""
    out: list[str] = []
    i = state.i
    if i == 0:
        return out

    # (V) exact membership count, paths end at the owner.
    for v, paths in state.q.items():
        if len(paths) != state.k_f:
            out.append(f"phase {i}: vertex {v} holds {len(paths)} cluster paths, expected {state.k_f}")
        for p in paths:
            if p.tail != v:
                out.append(f"phase {i}: path {p} of vertex {v} does not end at it")
            if len(p.vset) != len(p.vertices):
                out.append(f"phase {i}: path {p} repeats a vertex")

    # (III) per-vertex disjointness except the shared tail.
    for v, paths in state.q.items():
        seen: dict[int, int] = {}
        for idx, p in enumerate(paths):
            for x in p.vertices[:-1]:
                if x in seen:
                    out.append(f"phase {i}: vertex {v} paths {seen[x]} and {idx} share vertex {x}")
                    break
                seen[x] = idx

    # Distinct heads, heads are surviving centers.
    for v, paths in state.q.items():
        heads = [p.head for p in paths]
        if len(set(heads)) != len(heads):
            out.append(f"phase {i}: vertex {v} has duplicate cluster heads")
        for h in heads:
            if h not in state.centers:
                out.append(f"phase {i}: vertex {v} path head {h} is not a surviving center")

    # (IV) strictly increasing edge keys toward the owner.
    for v, paths in state.q.items():
        for p in paths:
            for a, b in zip(p.keys, p.keys[1:]):
                if not a < b:
                    out.append(f"phase {i}: path {p} of vertex {v} is not weight-monotone")
                    break

    # Continuity: a kept path with a surviving head stays chosen.
    for v in state.clustered:
        prev = state.prev_q.get(v, ())
        cur = set(p.vertices for p in state.q[v])
        for p in prev:
            if p.head in state.centers and p.vertices not in cur:
                out.append(f"phase {i}: vertex {v} dropped surviving path {p}")

    # Prefix closure: prefixes of chosen paths are chosen at their vertex,
    # both in this phase and (for vertices still clustered then) the prior one.
    qsets = {v: {p.vertices for p in paths} for v, paths in state.q.items()}
    prev_qsets = {v: {p.vertices for p in paths} for v, paths in state.prev_q.items()}
    for v in state.clustered:
        for p in state.q[v]:
            for idx, x in enumerate(p.vertices[:-1]):
                pref = p.vertices[: idx + 1]
                if x in state.clustered and pref not in qsets[x]:
                    out.append(f"phase {i}: prefix {pref} of {p} missing at vertex {x}")
                if x in state.prev_clustered and pref not in prev_qsets.get(x, set()):
                    out.append(f"phase {i}: prefix {pref} of {p} missing at prior-phase vertex {x}")

    # (II) every center's paths merge into a rooted tree of depth <= i.
    trees: dict[int, dict[int, int]] = {}
    for v in state.clustered:
        for p in state.q[v]:
            parent = trees.setdefault(p.head, {})
            verts = p.vertices
            if len(verts) - 1 > i:
                out.append(f"phase {i}: path {p} deeper than {i}")
            for a, b in zip(verts, verts[1:]):
                if b in parent and parent[b] != a:
                    out.append(f"phase {i}: tree {p.head}: vertex {b} has two parents")
                parent[b] = a

    # Every edge lies on at most two trees.
    edge_trees: dict[tuple[int, int], set[int]] = {}
    for v in state.clustered:
        for p in state.q[v]:
            for a, b in zip(p.vertices, p.vertices[1:]):
                e = (a, b) if a < b else (b, a)
                edge_trees.setdefault(e, set()).add(p.head)
    for e, roots in edge_trees.items():
        if len(roots) > 2:
            out.append(f"phase {i}: edge {e} appears in {len(roots)} trees")

    return out


def center_ratio(state: PhaseRecord, n: int) -> float:
    """|Z_i| against f^(i/k) * n^(1-i/k); monitored, not asserted."""
    if state.i >= state.k:
        return 0.0
    expected = state.f ** (state.i / state.k) * n ** (1 - state.i / state.k)
    return len(state.centers) / expected if expected else 0.0
