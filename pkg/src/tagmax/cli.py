"""Command line front end: gen, train, solve, bench, serve.

Exit codes: 0 success, 1 validation or usage error, 2 internal error.
"""
from __future__ import annotations

import argparse
import csv
import json
import multiprocessing
import statistics
import sys
import time
import traceback
from pathlib import Path

from .backend import BACKEND
from .dataset import (Dataset, DatasetError, SyntheticSpec, generate_synthetic,
                      load_csv, save_csv)
from .nbc import Model, ModelError, SmoothingSpec, train
from .oracle import NAIVE_ATTR_CAP, solve_naive
from .runner import ALGORITHMS, build_query, parse_tag_spec, run_solver

# Bench cells whose attribute count exceeds this skip the oracle column.
DEFAULT_ORACLE_CAP = 16
DEFAULT_CELL_TIMEOUT = 120.0


def _load_model(args) -> tuple[Model, Dataset | None]:
    """Model from --model JSON, or trained on the fly from --data CSV."""
    ds = load_csv(args.data) if getattr(args, "data", None) else None
    if getattr(args, "model", None):
        model = Model.from_json(Path(args.model).read_text(encoding="utf-8"))
        return model, ds
    if ds is None:
        raise ModelError("pass --model MODEL.json or --data DATA.csv")
    smoothing = SmoothingSpec(m_weight=args.m_weight, prior_mode=args.prior_mode)
    return train(ds, smoothing), ds


def _parse_tags(args) -> list[dict]:
    tokens = [t.strip() for t in args.tags.split(",") if t.strip()]
    if not tokens:
        raise ModelError("--tags needs at least one tag name")
    specs = []
    for tok in tokens:
        name, weight, polarity = parse_tag_spec(tok)
        specs.append({"name": name, "weight": weight, "polarity": polarity})
    if args.weights:
        weights = [float(w) for w in args.weights.split(",")]
        if len(weights) != len(specs):
            raise ModelError(
                f"--weights has {len(weights)} entries for {len(specs)} tags")
        for spec, w in zip(specs, weights):
            spec["weight"] = w
    return specs


def cmd_gen(args) -> int:
    spec = SyntheticSpec(n=args.n, m=args.m, r=args.r, seed=args.seed)
    ds = generate_synthetic(spec)
    save_csv(ds, args.out)
    print(f"wrote {ds.n} rows ({ds.m} attributes, {ds.r} tags) to {args.out}")
    return 0


def cmd_train(args) -> int:
    ds = load_csv(args.data)
    smoothing = SmoothingSpec(m_weight=args.m_weight, prior_mode=args.prior_mode)
    model = train(ds, smoothing)
    Path(args.out).write_text(model.to_json(), encoding="utf-8")
    print(f"trained {model.r} tag models on {model.n} rows, wrote {args.out}")
    return 0


def cmd_solve(args) -> int:
    model, ds = _load_model(args)
    if args.grouping != "contiguous" and ds is None:
        raise ModelError("--grouping correlation needs --data for the row matrix")
    specs = _parse_tags(args)
    query = build_query(model, specs, args.k)
    result = run_solver(
        model, query, args.algo,
        mprime=args.mprime, grouping_method=args.grouping, ds=ds,
        epsilon=args.epsilon, sigma=args.sigma, zprime=args.zprime,
        restarts=args.restarts, max_steps=args.max_steps, seed=args.seed,
        trace=args.trace)
    payload = {
        "algorithm": args.algo,
        "k": args.k,
        "tags": specs,
        "backend": BACKEND,
        **result.to_dict(),
    }
    print(json.dumps(payload, indent=2))
    return 0


def _bench_cell(cell: dict) -> dict:
    """One bench configuration, run in a worker process."""
    spec = SyntheticSpec(n=cell["n"], m=cell["m"], r=cell["r"], seed=cell["seed"])
    ds = generate_synthetic(spec)
    model = train(ds, SmoothingSpec())
    query = build_query(model, ds.tag_names[:cell["z"]], cell["k"])

    times = []
    result = None
    for _ in range(cell["reps"]):
        t0 = time.perf_counter()
        result = run_solver(
            model, query, cell["algo"],
            mprime=cell["mprime"], ds=ds, epsilon=cell["epsilon"],
            zprime=cell["zprime"], restarts=cell["restarts"], seed=cell["seed"])
        times.append(time.perf_counter() - t0)

    row = {k: cell[k] for k in ("algo", "n", "m", "r", "z", "k", "mprime",
                                "epsilon", "zprime", "restarts", "reps", "seed")}
    row.update({
        "status": "ok",
        "backend": BACKEND,
        "mean_wall_time": statistics.fmean(times),
        "candidates_examined": result.stats.candidates_examined,
        "score": result.entries[0].score if result.entries else None,
    })
    if cell["oracle"] and cell["m"] <= NAIVE_ATTR_CAP and cell["algo"] != "naive":
        oracle = solve_naive(model, query)
        row["oracle_score"] = oracle.entries[0].score
        if row["score"] is not None and row["oracle_score"] > 0:
            row["ratio"] = row["score"] / row["oracle_score"]
        if cell["algo"] == "ett":
            row["verified"] = result.bitstrings() == oracle.bitstrings()
    return row


def _bench_cells(args) -> list[dict]:
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    for a in algos:
        if a not in ALGORITHMS:
            raise ModelError(f"unknown algorithm {a!r}, expected one of {ALGORITHMS}")
    base = {
        "n": args.n, "m": args.m, "r": max(args.r, args.z), "z": args.z,
        "k": args.k, "mprime": args.mprime, "epsilon": args.epsilon,
        "zprime": args.zprime, "restarts": args.restarts, "reps": args.reps,
        "oracle": args.m <= args.oracle_cap,
    }
    cells = []
    if args.sweep == "algorithm":
        sweep_algos = [v for v in values]
        for a in sweep_algos:
            if a not in ALGORITHMS:
                raise ModelError(f"unknown algorithm {a!r} in --values")
        plan = [(None, a) for a in sweep_algos]
    else:
        plan = [(int(v), a) for v in values for a in algos]
    for idx, (value, algo) in enumerate(plan):
        cell = dict(base)
        cell["algo"] = algo
        if value is not None:
            cell[args.sweep] = value
        cell["r"] = max(cell["r"], cell["z"])
        cell["oracle"] = cell["m"] <= args.oracle_cap
        cell["seed"] = args.seed * 1000 + idx
        cells.append(cell)
    return cells


def cmd_bench(args) -> int:
    cells = _bench_cells(args)
    rows: list[dict] = []
    if args.parallel > 1:
        # Concurrent cells share cores, so wall times are not comparable
        # and the per-cell timeout is not enforced.
        with multiprocessing.Pool(args.parallel) as pool:
            rows = pool.map(_bench_cell, cells)
    else:
        pool = multiprocessing.Pool(1)
        try:
            for cell in cells:
                pending = pool.apply_async(_bench_cell, (cell,))
                try:
                    rows.append(pending.get(timeout=args.timeout))
                except multiprocessing.TimeoutError:
                    pool.terminate()
                    pool.join()
                    pool = multiprocessing.Pool(1)
                    timed_out = {k: cell[k] for k in
                                 ("algo", "n", "m", "r", "z", "k", "seed")}
                    timed_out["status"] = "timeout"
                    rows.append(timed_out)
        finally:
            pool.terminate()
            pool.join()

    out = Path(args.out)
    with out.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    if args.csv:
        fieldnames: list[str] = []
        for row in rows:
            for key in row:
                if key not in fieldnames:
                    fieldnames.append(key)
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=fieldnames)
            writer.writeheader()
            writer.writerows(rows)
    ok = sum(1 for r in rows if r.get("status") == "ok")
    print(f"bench complete: {ok}/{len(rows)} cells ok, report at {out}")
    for row in rows:
        swept = row.get("algo") if args.sweep == "algorithm" else row.get(args.sweep)
        label = f"{row.get('algo')} {args.sweep}={swept}"
        if row.get("status") != "ok":
            print(f"  {label}: {row.get('status')}")
        else:
            print(f"  {label}: {row['mean_wall_time']:.4f}s, "
                  f"candidates={row['candidates_examined']}, score={row['score']:.6f}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    app = create_app(model_path=args.model, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tagmax",
        description="Design top-k products maximizing expected desirable tags.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a synthetic catalog CSV")
    p.add_argument("--n", type=int, required=True, help="rows")
    p.add_argument("--m", type=int, required=True, help="attributes")
    p.add_argument("--r", type=int, required=True, help="tags")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("train", help="fit tag models and write model JSON")
    p.add_argument("--data", required=True, help="catalog CSV")
    p.add_argument("--out", required=True, help="model JSON path")
    p.add_argument("--m-weight", type=float, default=1.0,
                   help="m-estimate equivalent sample size")
    p.add_argument("--prior-mode", choices=("uniform", "class-prior"),
                   default="uniform")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("solve", help="run one solver and print the top-k JSON")
    p.add_argument("--model", help="model JSON from `train`")
    p.add_argument("--data", help="catalog CSV (trains with defaults)")
    p.add_argument("--m-weight", type=float, default=1.0)
    p.add_argument("--prior-mode", choices=("uniform", "class-prior"),
                   default="uniform")
    p.add_argument("--algo", choices=ALGORITHMS, required=True)
    p.add_argument("--tags", required=True,
                   help="comma list of tag names; prefix ! for undesirable")
    p.add_argument("--weights", help="comma list of per-tag weights")
    p.add_argument("-k", "--k", type=int, default=1)
    p.add_argument("--mprime", type=int, default=None,
                   help="ett: max attributes per group (default 3)")
    p.add_argument("--grouping", choices=("contiguous", "correlation"),
                   default="contiguous")
    p.add_argument("--epsilon", type=float, default=None, help="pa: guarantee knob")
    p.add_argument("--sigma", type=float, default=None,
                   help="pa: compression factor, overrides epsilon")
    p.add_argument("--zprime", type=int, default=2, help="pa: tags per group")
    p.add_argument("--restarts", type=int, default=16, help="hc: restart count")
    p.add_argument("--max-steps", type=int, default=None, help="hc: step cap")
    p.add_argument("--seed", type=int, default=0, help="hc: restart seed")
    p.add_argument("--trace", action="store_true",
                   help="include per-round/per-iteration traces in stats")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="sweep a parameter and write a JSONL report")
    p.add_argument("--sweep", choices=("m", "z", "n", "mprime", "algorithm"),
                   required=True)
    p.add_argument("--values", required=True, help="comma list of sweep values")
    p.add_argument("--algos", default="ett",
                   help="comma list of algorithms per sweep value")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--m", type=int, default=12)
    p.add_argument("--r", type=int, default=8)
    p.add_argument("--z", type=int, default=4)
    p.add_argument("-k", "--k", type=int, default=1)
    p.add_argument("--mprime", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--zprime", type=int, default=2)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--reps", type=int, default=3,
                   help="timed repetitions per cell, averaged")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timeout", type=float, default=DEFAULT_CELL_TIMEOUT,
                   help="per-cell seconds before the row is marked timed-out")
    p.add_argument("--oracle-cap", type=int, default=DEFAULT_ORACLE_CAP,
                   help="skip oracle comparison above this attribute count")
    p.add_argument("--parallel", type=int, default=1,
                   help="worker processes; >1 disables honest timings")
    p.add_argument("--out", required=True, help="JSONL report path")
    p.add_argument("--csv", help="optional CSV mirror of the report")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--model", required=True, help="model JSON from `train`")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static", default=None,
                   help="directory of web assets to mount at /")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (DatasetError, ModelError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
