import math

import pytest

from ftspanner.graphs import Graph, Path, generate
from ftspanner.meta import (FanEntry, PhaseRecord, build_fan, build_ft_spanner,
                            center_ratio, check_invariants, choose_cluster,
                            le_edge_ids, sample_fan_paths, shortcut)
from ftspanner.rng import substream
from ftspanner.verify import verify_spanner


def path_of(*verts, w0=1):
    p = Path.trivial(verts[0])
    for idx, v in enumerate(verts[1:]):
        p = p.extend(v, 100 + idx, (w0 + idx, 100 + idx))
    return p


# --- step 1 -----------------------------------------------------------------

def test_fan_rejects_shared_interior():
    # two candidates through the same bridge vertex: only the first joins
    z1, z2, a, v = 0, 1, 2, 3
    inc_v = [(5, 7, a)]
    samples = {a: [path_of(z1, a), path_of(z2, a)]}
    fan = build_fan(v, (Path.trivial(v),), inc_v, samples)
    grown = [e for e in fan if e.src is not None]
    assert len(grown) == 1
    assert grown[0].path.vertices == (z1, a, v)


def test_fan_accepts_disjoint_candidates():
    v = 9
    inc_v = [(3, 1, 2), (5, 2, 4)]
    samples = {2: [path_of(0, 2)], 4: [path_of(1, 4)]}
    fan = build_fan(v, (Path.trivial(v),), inc_v, samples)
    assert sum(1 for e in fan if e.src is not None) == 2


def test_fan_maximality_post_hoc():
    g = generate("gnp", n=26, p=0.5, seed=6)
    rng = substream(4, "maximality")
    inc = {v: [(w, eid, u) for (w, eid, u) in g.adj[v]] for v in range(g.n)}
    samples = {u: [Path.trivial(u)] for u in range(g.n)}
    for variant in ("seq", "mod"):
        for v in range(0, g.n, 5):
            fan = build_fan(v, (Path.trivial(v),), inc[v], samples, variant)
            covered = set()
            for e in fan:
                covered |= e.orig.vset
            for _, _, u in inc[v]:
                for p in samples[u]:
                    assert p.vset & covered, "a disjoint sampled path was left out"


def test_fan_variants_differ_only_in_order():
    # with singleton samples both variants accept every neighbor
    g = generate("complete", n=8, seed=1)
    inc = [(w, eid, u) for (w, eid, u) in g.adj[0]]
    samples = {u: [Path.trivial(u)] for u in range(1, 8)}
    f_seq = build_fan(0, (Path.trivial(0),), inc, samples, "seq")
    f_mod = build_fan(0, (Path.trivial(0),), inc, samples, "mod")
    assert {e.path.vertices for e in f_seq} == {e.path.vertices for e in f_mod}


# --- shortcut ---------------------------------------------------------------

def test_shortcut_picks_lightest_backward_edge():
    s, a, b, v = 0, 1, 2, 3
    p = (Path.trivial(s).extend(a, 10, (1, 10)).extend(b, 11, (2, 11))
         .extend(v, 12, (7, 12)))
    edge_of = {a: (5, 13), b: (7, 12)}
    cut = shortcut(p, edge_of)
    assert cut.vertices == (s, a, v)
    assert cut.last_key == (5, 13)


def test_shortcut_identity_when_last_edge_lightest():
    s, a, v = 0, 1, 2
    p = Path.trivial(s).extend(a, 3, (2, 3)).extend(v, 4, (4, 4))
    assert shortcut(p, {a: (4, 4)}) is p


def test_shortcut_obs_on_random_instances():
    # the produced last edge is no heavier than any remaining edge from
    # the original path into the owner
    g = generate("gnp", n=30, p=0.5, seed=3, weights=(1, 50))
    for v in range(0, 30, 3):
        inc = [(w, eid, u) for (w, eid, u) in g.adj[v]]
        edge_of = {u: (w, eid) for (w, eid, u) in inc}
        samples = {u: [Path.trivial(u)] for (_, _, u) in inc}
        fan = build_fan(v, (Path.trivial(v),), inc, samples)
        for e in fan:
            if e.src is None:
                continue
            lk = e.path.last_key
            for x in e.orig.vertices[:-1]:
                if x in edge_of:
                    assert lk <= edge_of[x]


# --- step 2 / step 3 --------------------------------------------------------

def _entries_with_heads(heads):
    out = []
    for j, h in enumerate(heads):
        p = Path.trivial(h).extend(99, 50 + j, (10 + j, 50 + j))
        out.append(FanEntry(p, p, None))
    return out


def test_choose_cluster_unrolled():
    entries = _entries_with_heads([0, 1, 2, 3, 4])
    sampled = {1, 3, 4}
    ok, q, i_v = choose_cluster(entries, lambda e: e.path.head in sampled, 2)
    assert ok
    assert [p.head for p in q] == [1, 3]
    assert i_v == 4  # 1-based index of the second sampled entry


def test_choose_cluster_empty_center_set():
    entries = _entries_with_heads([0, 1, 2])
    ok, q, i_v = choose_cluster(entries, lambda e: False, 2)
    assert not ok and q == () and i_v == 4


def test_le_edges_cases():
    heads = [0, 1, 2]
    entries = _entries_with_heads(heads)
    inc = [(5, 7, 0), (6, 8, 1), (9, 9, 5)]
    # i_v = 1: nothing before the first entry
    assert le_edge_ids(entries, 1, inc) == []
    # unclustered: every fan vertex is covered
    got = le_edge_ids(entries, len(entries) + 1, inc)
    assert got == [7, 8]


def test_sample_paths_dedup_and_determinism():
    paths = tuple(path_of(i, 50) for i in range(6))
    a = sample_fan_paths(paths, substream(1, "s"), 20)
    b = sample_fan_paths(paths, substream(1, "s"), 20)
    assert a == b
    assert len({p.vertices for p in a}) == len(a)
    assert set(a) <= set(paths)
    assert sample_fan_paths((paths[0],), substream(2, "s"), 5) == [paths[0]]


# --- whole builds -----------------------------------------------------------

def test_tree_spanner_is_whole_graph():
    t = generate("tree", n=30, seed=4)
    for variant in ("seq", "mod"):
        res = build_ft_spanner(t, 1, 3, seed=2, variant=variant)
        assert set(res.edges) == set(range(t.m))


def test_trace_shape_and_determinism(gnp30):
    res = build_ft_spanner(gnp30, 1, 3, seed=9)
    assert len(res.trace) == 3
    assert res.trace[-1].remaining == 0
    assert res.to_json() == build_ft_spanner(gnp30, 1, 3, seed=9).to_json()
    assert res.to_json() != build_ft_spanner(gnp30, 1, 3, seed=10).to_json()


def test_exhaustive_protection_with_clustering(dense34):
    for seed in range(3):
        res = build_ft_spanner(dense34, 1, 2, seed=seed, c_k=1, record_states=True)
        assert res.trace[0].clustered > 0, "fixture must exercise clustering"
        rep = verify_spanner(dense34, res.edges, 1, 2)
        assert rep.passed, rep.violations[:3]


def test_exhaustive_protection_f2_with_clustering():
    g = generate("gnp", n=26, p=0.7, seed=3, weights=(1, 40))
    for seed in range(3):
        res = build_ft_spanner(g, 2, 2, seed=seed, c_k=1, record_states=True)
        assert res.trace[0].clustered > 0
        assert not [d for st in res.states for d in check_invariants(st)]
        rep = verify_spanner(g, res.edges, 2, 2)
        assert rep.passed, rep.violations[:3]


def test_parallel_mis_variant_verified(dense34):
    res = build_ft_spanner(dense34, 1, 2, seed=2, variant="mod", mis="parallel",
                           c_k=1, record_states=True)
    assert not [d for st in res.states for d in check_invariants(st)]
    assert verify_spanner(dense34, res.edges, 1, 2).passed


def test_remaining_edges_shrink_and_stay_clustered():
    g = generate("gnp", n=60, p=0.5, seed=7)
    res = build_ft_spanner(g, 1, 3, seed=1, c_k=1, record_states=True)
    for prev, cur in zip(res.states, res.states[1:]):
        assert cur.remaining <= prev.remaining
        for eid in cur.remaining:
            u, v = g.endpoints(eid)
            assert u in cur.clustered and v in cur.clustered


def test_invariants_hold_across_phases():
    g = generate("gnp", n=200, p=0.3, seed=2)
    for k in (2, 3):
        res = build_ft_spanner(g, 1, k, seed=0, c_k=1, record_states=True)
        for st in res.states:
            assert check_invariants(st) == [], (k, st.i)
        assert any(st.i > 0 and st.clustered for st in res.states)


def test_center_ratio_monitored_not_asserted():
    g = generate("gnp", n=200, p=0.3, seed=2)
    res = build_ft_spanner(g, 1, 2, seed=0, c_k=1, record_states=True)
    r = center_ratio(res.states[1], 200)
    assert r > 0


def test_injected_violations_detected():
    g = generate("gnp", n=34, p=0.5, seed=11)
    res = build_ft_spanner(g, 1, 2, seed=0, c_k=1, record_states=True)
    st = res.states[1]
    v = next(iter(st.clustered))
    paths = st.q[v]
    assert len(paths) >= 2

    # shared interior vertex across two cluster paths
    p0 = paths[0]
    other = paths[1].vertices[0]
    bad = Path((other,) + p0.vertices, (77,) + p0.edges, ((1, 77),) + p0.keys)
    broken = PhaseRecord(st.i, st.k, st.f, st.k_f, st.centers, st.clustered,
                         {**st.q, v: (bad,) + paths[1:]}, st.spanner,
                         st.remaining, st.prev_centers, st.prev_clustered,
                         st.prev_q)
    diags = check_invariants(broken)
    assert any("share vertex" in d for d in diags)

    # non-monotone weights
    p0 = paths[0]
    if p0.hops >= 1:
        bad = Path(p0.vertices + (g.n - 1,), p0.edges + (88,), p0.keys + ((0, -2),))
    broken = PhaseRecord(st.i, st.k, st.f, st.k_f, st.centers, st.clustered,
                         {**st.q, v: (bad,) + paths[1:]}, st.spanner,
                         st.remaining, st.prev_centers, st.prev_clustered,
                         st.prev_q)
    assert any("monotone" in d for d in check_invariants(broken))

    # wrong membership count
    broken = PhaseRecord(st.i, st.k, st.f, st.k_f, st.centers, st.clustered,
                         {**st.q, v: paths[:-1]}, st.spanner, st.remaining,
                         st.prev_centers, st.prev_clustered, st.prev_q)
    assert any("cluster paths" in d for d in check_invariants(broken))


def test_phase_zero_state_is_clean():
    g = generate("gnp", n=20, p=0.4, seed=1)
    res = build_ft_spanner(g, 1, 2, seed=0, record_states=True)
    assert res.states[0].i == 0
    assert check_invariants(res.states[0]) == []


def test_precondition_errors():
    g = generate("gnp", n=10, p=0.5, seed=0)
    with pytest.raises(ValueError):
        build_ft_spanner(g, 0, 2)
    with pytest.raises(ValueError):
        build_ft_spanner(g, 10, 2)
    with pytest.raises(ValueError):
        build_ft_spanner(g, 1, 1)


def test_zero_edge_graph():
    g = generate("gnp", n=4, p=0.0, seed=0)
    res = build_ft_spanner(g, 1, 2, seed=0)
    assert res.edge_count == 0
