"""Command-line front end.

Subcommands: gen, build, verify, certificate, simulate, mis-bench,
hitting-set, bench, report. JSON is the machine interface (canonically
ordered, timings excluded); TSV is emitted only for plotting tables.
Exit codes: 0 success/pass, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import statistics
import sys
import time
from pathlib import Path as FsPath

from ftspanner.congest import BandwidthExceeded, simulate_distributed_spanner
from ftspanner.detkit import HittingInstance, beta_hitting_set, build_ft_spanner_det
from ftspanner.graphs import Graph, GraphError, ParseError, generate, load_graph
from ftspanner.meta import build_ft_spanner
from ftspanner.parmis import (PathConflictInstance, lex_first_mis,
                              parallel_greedy_mis, random_permutation)
from ftspanner.result import SpannerResult
from ftspanner.rng import substream
from ftspanner.verify import BudgetExceeded, verify_certificate, verify_spanner
from ftspanner.warmup import build_3spanner, warmup_size_report


def _write(text: str, out: str | None):
    if out:
        FsPath(out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_graph(path: str) -> Graph:
    return load_graph(FsPath(path).read_text())


def _parse_weights(spec: str | None):
    if spec in (None, "unit"):
        return None
    lo, hi = spec.split(":")
    return (int(lo), int(hi))


def _gen_from_args(args) -> Graph:
    params = {}
    for name in ("n", "p", "d", "rows", "cols"):
        val = getattr(args, name.replace("-", "_"), None)
        if val is not None:
            params[name] = val
    return generate(args.kind, seed=args.seed,
                    weights=_parse_weights(args.weights), **params)


def cmd_gen(args) -> int:
    g = _gen_from_args(args)
    _write(g.to_edge_list(), args.out)
    return 0


def _build(g: Graph, algo: str, f: int, k: int, seed, variant: str,
           mis: str, c_k: int, c_s: int) -> SpannerResult:
    if algo == "warmup":
        if k != 2:
            raise ValueError("the warmup build is defined for k = 2 only")
        res = build_3spanner(g, f, seed=seed, c_s=c_s)
        res.extras["size_report"] = warmup_size_report(res)
        return res
    if algo == "meta":
        return build_ft_spanner(g, f, k, seed=seed, variant=variant,
                                c_k=c_k, c_s=c_s, mis=mis)
    if algo == "meta-det":
        return build_ft_spanner_det(g, f, k, c_k=c_k)
    raise ValueError(f"unknown algo {algo!r}")


def cmd_build(args) -> int:
    g = _read_graph(args.graph)
    res = _build(g, args.algo, args.f, args.k, args.seed, args.variant,
                 args.mis, args.ck, args.cs)
    _write(res.to_json(), args.out)
    return 0


def cmd_verify(args) -> int:
    g = _read_graph(args.graph)
    res = SpannerResult.from_json(FsPath(args.result).read_text())
    if res.graph_sha != g.sha():
        print("error: result file was built from a different graph", file=sys.stderr)
        return 2
    f = args.f if args.f is not None else res.params.get("f")
    k = args.k if args.k is not None else res.params.get("k")
    report = verify_spanner(g, res.edges, f, k, mode=args.mode, seed=args.seed)
    _write(report.to_json(), args.out)
    print(("PASS" if report.passed else "FAIL")
          + f" mode={report.mode} edges={len(res.edges)}/{g.m}"
          + f" worst_stretch={report.worst_stretch}", file=sys.stderr)
    return 0 if report.passed else 1


def cmd_certificate(args) -> int:
    g = _read_graph(args.graph)
    if args.lam < 1:
        raise ValueError("lambda must be >= 1")
    if args.lam > g.n:
        raise ValueError(f"lambda={args.lam} larger than the vertex count {g.n}")
    f = max(1, args.lam - 1)
    k = max(2, math.ceil(math.log2(max(g.n, 2))))
    res = build_ft_spanner(g, f, k, seed=args.seed, c_k=args.ck, c_s=args.cs)
    res.params["lambda"] = args.lam
    res.params["role"] = "certificate"
    _write(res.to_json(), args.out)
    if args.check:
        report = verify_certificate(g, res.edges, args.lam)
        print(("PASS" if report.passed else "FAIL")
              + f" mode={report.mode} fault_sets={report.fault_sets}",
              file=sys.stderr)
        return 0 if report.passed else 1
    return 0


_LOG_TAGS = {"paths": 1, "center": 2, "heads": 3, "edge-state": 4,
             "register": 5, "tree": 6}


def _dump_message_log(log, path: str):
    # one record per message: round u32, src u32, dst u32, bits u16, tag u8
    import struct

    with open(path, "wb") as fh:
        fh.write(b"FTSLOG1\n")
        for rnd, (src, dst), bits, tag in log:
            fh.write(struct.pack("<IIIHB", rnd, src, dst, bits,
                                 _LOG_TAGS.get(tag, 0)))


def cmd_simulate(args) -> int:
    g = _read_graph(args.graph)
    res, rounds = simulate_distributed_spanner(
        g, args.f, args.k, seed=args.seed, c_b=args.cb,
        record_messages=bool(args.dump_log))
    _write(res.to_json(), args.out)
    if args.dump_log:
        _dump_message_log(rounds.log, args.dump_log)
    print(json.dumps(rounds.to_dict(), sort_keys=True), file=sys.stderr)
    return 0


def cmd_mis_bench(args) -> int:
    rng = substream(args.seed, "mis-bench")
    lines = ["instances\tpaths\tverts\trounds\twork\tmis_size\tmatches_lex"]
    for idx in range(args.instances):
        n_paths = rng.randint(2, args.max_paths)
        n_verts = rng.randint(4, args.max_verts)
        paths = []
        for _ in range(n_paths):
            size = rng.randint(1, min(5, n_verts))
            paths.append(frozenset(rng.sample(range(n_verts), size)))
        inst = PathConflictInstance(tuple(paths),
                                    random_permutation(n_paths, (args.seed, idx)))
        par, tr = parallel_greedy_mis(inst)
        lex = lex_first_mis(inst)
        lines.append(f"{idx}\t{n_paths}\t{n_verts}\t{tr.rounds}\t{tr.work}"
                     f"\t{len(par)}\t{int(par == lex)}")
    _write("\n".join(lines) + "\n", args.out)
    return 0


def cmd_hitting_set(args) -> int:
    spec = json.loads(FsPath(args.instance).read_text())
    inst = HittingInstance(
        ground=tuple(spec["ground"]),
        sets=tuple(tuple(s) for s in spec["sets"]),
        delta=float(spec["delta"]),
        beta=int(spec.get("beta", 1)),
        c=float(spec.get("c", 1.0)),
    )
    chosen = beta_hitting_set(inst)
    _write(json.dumps({"hitting_set": sorted(chosen),
                       "size": len(chosen),
                       "bound": len(inst.ground) / inst.delta},
                      sort_keys=True) + "\n", args.out)
    return 0


def _bench_cell(genspec: dict, algo: str, f: int, k: int, seed, c_k: int = 20) -> dict:
    g = generate(**genspec, seed=1000 + seed)
    t0 = time.perf_counter()
    if algo == "meta-det":
        res = build_ft_spanner_det(g, f, k, c_k=c_k)
    elif algo == "warmup":
        res = build_3spanner(g, f, seed=seed)
    else:
        res = build_ft_spanner(g, f, k, seed=seed, c_k=c_k)
    dt = time.perf_counter() - t0
    return {"n": g.n, "m": g.m, "f": f, "k": k, "algo": algo,
            "edges": res.edge_count, "seconds": dt, "seed": seed}


def bench_rows(suite: str, n: int, m: int, k: int, f_values, seeds,
               algo: str = "meta", c_k: int = 20) -> list[dict]:
    """Timing cells for the stock sweeps; one median row per (f, k, m)."""
    rows = []
    if suite == "m-sweep":
        cells = [(n, m_i, 2, k) for m_i in (m, 2 * m, 4 * m)]
    else:
        cells = [(n, m, f, k) for f in f_values]
    threads = int(os.environ.get("FTSPANNER_THREADS", "1"))
    for cn, cm, cf, ck in cells:
        p = min(1.0, 2 * cm / (cn * (cn - 1)))
        genspec = {"kind": "gnp", "n": cn, "p": p}
        runs = [(genspec, algo, cf, ck, s, c_k) for s in seeds]
        if threads > 1:
            from concurrent.futures import ProcessPoolExecutor

            with ProcessPoolExecutor(max_workers=threads) as pool:
                outs = list(pool.map(_bench_cell_star, runs))
        else:
            outs = [_bench_cell(*r) for r in runs]
        med = statistics.median(o["seconds"] for o in outs)
        rows.append({"n": cn, "m": outs[0]["m"], "f": cf, "k": ck,
                     "algo": algo, "edges": outs[0]["edges"],
                     "seconds": med, "seeds": len(seeds)})
    return rows


def _bench_cell_star(args):
    return _bench_cell(*args)


def cmd_bench(args) -> int:
    seeds = list(range(args.seeds))
    algo = "meta-det" if args.suite == "det-f-sweep" else "meta"
    rows = bench_rows(args.suite, args.n, args.m, args.k,
                      [int(x) for x in args.f.split(",")], seeds, algo,
                      c_k=args.ck)
    lines = ["n\tm\tf\tk\talgo\tedges\tseconds"]
    for r in rows:
        lines.append(f"{r['n']}\t{r['m']}\t{r['f']}\t{r['k']}\t{r['algo']}"
                     f"\t{r['edges']}\t{r['seconds']:.4f}")
    _write("\n".join(lines) + "\n", args.out)
    return 0


def cmd_report(args) -> int:
    res = SpannerResult.from_json(FsPath(args.result).read_text())
    if args.tsv:
        lines = ["phase\tcenters\tclustered\tnew_edges\tremaining"]
        for t in res.trace:
            lines.append(f"{t.phase}\t{t.centers}\t{t.clustered}"
                         f"\t{t.new_edges}\t{t.remaining}")
        _write("\n".join(lines) + "\n", args.out)
        return 0
    lines = [
        f"algo: {res.algo}",
        f"graph: n={res.n} m={res.m} sha={res.graph_sha[:12]}",
        f"params: {json.dumps(res.params, sort_keys=True)}",
        f"edges: {res.edge_count}",
    ]
    bound = res.extras.get("size_bound")
    if bound:
        lines.append(f"size_bound: {bound:.1f} ratio={res.edge_count / bound:.4f}")
    for t in res.trace:
        lines.append(f"phase {t.phase}: centers={t.centers} clustered={t.clustered}"
                     f" new_edges={t.new_edges} remaining={t.remaining}")
    _write("\n".join(lines) + "\n", args.out)
    return 0


def make_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="ftspanner")
    sub = top.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="generate a graph edge list")
    p.add_argument("--kind", required=True,
                   choices=["gnp", "random-regular", "grid", "complete", "tree", "cycle"])
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--d", type=int)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--weights", default=None, help="'unit' or 'LO:HI'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("build", help="build a fault-tolerant spanner")
    p.add_argument("--graph", required=True)
    p.add_argument("--algo", default="meta", choices=["warmup", "meta", "meta-det"])
    p.add_argument("--f", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--variant", default="seq", choices=["seq", "mod"])
    p.add_argument("--mis", default="greedy", choices=["greedy", "parallel"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ck", type=int, default=20)
    p.add_argument("--cs", type=int, default=4)
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("verify", help="verify a stored build result")
    p.add_argument("--graph", required=True)
    p.add_argument("--result", required=True)
    p.add_argument("--f", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--mode", default="exhaustive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("certificate", help="build a vertex-connectivity certificate")
    p.add_argument("--graph", required=True)
    p.add_argument("--lam", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ck", type=int, default=20)
    p.add_argument("--cs", type=int, default=4)
    p.add_argument("--check", action="store_true")
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_certificate)

    p = sub.add_parser("simulate", help="run the message-passing simulation")
    p.add_argument("--graph", required=True)
    p.add_argument("--f", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cb", type=int, default=4)
    p.add_argument("--dump-log", help="write the binary message log here")
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("mis-bench", help="random MIS instances, rounds/work TSV")
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--max-paths", type=int, default=200)
    p.add_argument("--max-verts", type=int, default=60)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_mis_bench)

    p = sub.add_parser("hitting-set", help="solve a JSON hitting-set instance")
    p.add_argument("--instance", required=True)
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_hitting_set)

    p = sub.add_parser("bench", help="timing sweeps")
    p.add_argument("--suite", required=True,
                   choices=["f-sweep", "m-sweep", "det-f-sweep"])
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--m", type=int, default=100000)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--f", default="1,2,4,8")
    p.add_argument("--ck", type=int, default=20)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("report", help="summarize a stored result")
    p.add_argument("--result", required=True)
    p.add_argument("--tsv", action="store_true")
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_report)

    return top


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (GraphError, ParseError, ValueError, FileNotFoundError, KeyError,
            BudgetExceeded, BandwidthExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
