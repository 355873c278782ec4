"""Command-line front end: generate, solve, oracle, verify, bench.

Exit codes: 0 success, 1 a solve finished on a limit, 2 usage errors or
unreadable inputs.  All numeric output uses fixed formats so repeated runs
with identical seeds and limits produce identical result columns.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .bnc import CSV_HEADER, BncConfig, root_relaxation, solve
from .instance import GeneratorParams, InstanceError, generate_instance, load_instance, save_instance
from .oracle import brute_force_solve
from .verify import verify_aggregation, verify_hull, verify_prop61

USAGE_ERROR = 2
LIMIT_EXIT = 1


def _read_instance(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return load_instance(fh)
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR) from None
    except InstanceError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR) from None


def _write_text(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _int_list(value: str) -> list[int]:
    try:
        return [int(tok) for tok in value.split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {value!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scflp", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a random instance")
    gen.add_argument("--style", choices=("biesinger", "qi"), default="biesinger")
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=int, required=True)
    gen.add_argument("--r", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=None)

    so = sub.add_parser("solve", help="branch-and-cut solve of one instance")
    so.add_argument("--in", dest="path", required=True)
    so.add_argument("--form", choices=("SF", "GSF", "EF"), default="GSF")
    so.add_argument("--time-limit", type=float, default=7200.0)
    so.add_argument("--gap", type=float, default=0.0)
    so.add_argument("--seed", type=int, default=0)
    so.add_argument("--out", default=None)
    so.add_argument("--events", default=None, help="JSON-lines event log path")

    orc = sub.add_parser("oracle", help="brute-force bilevel enumeration")
    orc.add_argument("--in", dest="path", required=True)
    orc.add_argument("--out", default=None)

    ver = sub.add_parser("verify", help="structural checks on one instance")
    ver.add_argument("--in", dest="path", required=True)
    ver.add_argument("--checks", default="hull,prop61,aggregation")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--trials", type=int, default=50)
    ver.add_argument("--out", default=None)

    be = sub.add_parser("bench", help="benchmark campaign with CSV output")
    be.add_argument("--in", dest="path", default=None, help="solve one instance file instead of generating")
    be.add_argument("--style", choices=("biesinger", "qi"), default="biesinger")
    be.add_argument("--m", type=int, default=40)
    be.add_argument("--n", type=int, default=40)
    be.add_argument("--p", type=_int_list, default=[2, 3])
    be.add_argument("--r", type=_int_list, default=[2, 3])
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--form", default="SF,GSF,EF", help="comma list of formulations")
    be.add_argument("--time-limit", type=float, default=7200.0)
    be.add_argument("--gap", type=float, default=0.0)
    be.add_argument("--workers", type=int, default=1)
    be.add_argument("--out", required=True)
    return ap


def _cmd_generate(args) -> int:
    params = GeneratorParams(style=args.style, m=args.m, n=args.n, p=args.p, r=args.r, seed=args.seed)
    try:
        inst = generate_instance(params)
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    _write_text(args.out, save_instance(inst))
    return 0


def _cmd_solve(args) -> int:
    inst = _read_instance(args.path)
    cfg = BncConfig(formulation=args.form, time_limit=args.time_limit, gap_tol=args.gap, seed=args.seed)
    events = open(args.events, "w", encoding="utf-8") if args.events else None
    try:
        report = solve(inst, cfg, events=events)
    finally:
        if events is not None:
            events.close()
    lines = [
        f"O={report.objective:.6f}",
        f"status={report.status}",
        f"bound={report.upper_bound:.6f}",
        f"gap_pct={report.gap_pct:.4f}",
        f"nodes={report.nodes}",
        f"cuts={report.cuts}",
        f"x={''.join(str(int(b)) for b in report.best_x)}" if report.best_x is not None else "x=",
    ]
    text = "\n".join(lines) + "\n" + CSV_HEADER + "\n" + report.csv_row(Path(args.path).name) + "\n"
    _write_text(args.out, text)
    return 0 if report.status == "optimal" else LIMIT_EXIT


def _cmd_oracle(args) -> int:
    inst = _read_instance(args.path)
    report = brute_force_solve(inst)
    lines = [f"value={report.value:.6f}", f"optima={len(report.optimal_x)}"]
    lines += ["x=" + "".join(str(int(b)) for b in x) for x in report.optimal_x]
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def _cmd_verify(args) -> int:
    inst = _read_instance(args.path)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    unknown = set(checks) - {"hull", "prop61", "aggregation"}
    if unknown or not checks:
        print(f"error: bad check list {args.checks!r}", file=sys.stderr)
        return USAGE_ERROR
    rng = np.random.default_rng(args.seed)
    lines = []
    ok = True
    for check in checks:
        if check == "hull":
            y = np.zeros(inst.n, dtype=np.int8)
            y[rng.choice(inst.n, size=inst.r, replace=False)] = 1
            rep = verify_hull(inst, y, trials=args.trials, seed=args.seed)
            good = rep.max_discrepancy < 1e-7
            lines.append(f"hull: {'pass' if good else 'FAIL'} max_discrepancy={rep.max_discrepancy:.3e}")
        elif check == "prop61":
            worst = 0.0
            for _ in range(args.trials):
                x = rng.uniform(0.0, 1.0, size=inst.n)
                y = np.zeros(inst.n, dtype=np.int8)
                y[rng.choice(inst.n, size=inst.r, replace=False)] = 1
                worst = max(worst, verify_prop61(inst, x, y))
            good = worst < 1e-10
            lines.append(f"prop61: {'pass' if good else 'FAIL'} max_discrepancy={worst:.3e}")
        else:
            rep = verify_aggregation(inst, trials=min(args.trials, 5), seed=args.seed)
            gap = abs(rep.shared_value - rep.disaggregated_value)
            good = gap < 1e-7 and rep.max_greedy_gap < 1e-7 and rep.max_dual_gap < 1e-9
            lines.append(
                "aggregation: "
                f"{'pass' if good else 'FAIL'} lp_gap={gap:.3e} "
                f"greedy_gap={rep.max_greedy_gap:.3e} dual_gap={rep.max_dual_gap:.3e}"
            )
        ok = ok and good
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0 if ok else 1


def _bench_task(payload):
    """Worker body: one (instance, formulation) solve to a CSV row."""
    text, label, form, time_limit, gap, seed = payload
    inst = load_instance(text)
    cfg = BncConfig(formulation=form, time_limit=time_limit, gap_tol=gap, seed=seed)
    report = solve(inst, cfg)
    if report.status == "optimal" and not np.isnan(report.objective):
        _, rg = root_relaxation(inst, cfg, true_opt=report.objective)
    else:
        rg = float("nan")
    row = (
        f"{label},{form},"
        f"{'' if np.isnan(report.objective) else format(report.objective, '.6f')},"
        f"{report.total_time_s:.3f},{report.nodes},{report.cuts},{report.sep_time_s:.3f},"
        f"{'' if np.isnan(rg) else format(rg, '.4f')},{report.status}"
    )
    return row, report.status, report.total_time_s, form


def _cmd_bench(args) -> int:
    forms = [f.strip() for f in args.form.split(",") if f.strip()]
    bad = set(forms) - {"SF", "GSF", "EF"}
    if bad:
        print(f"error: unknown formulations {sorted(bad)}", file=sys.stderr)
        return USAGE_ERROR

    tasks = []
    if args.path:
        inst = _read_instance(args.path)
        label = Path(args.path).name
        for form in forms:
            tasks.append((save_instance(inst), label, form, args.time_limit, args.gap, args.seed))
    else:
        idx = 0
        for p in args.p:
            for r in args.r:
                params = GeneratorParams(style=args.style, m=args.m, n=args.n, p=p, r=r, seed=args.seed + idx)
                inst = generate_instance(params)
                label = f"{args.style}_m{args.m}_n{args.n}_p{p}_r{r}_s{args.seed + idx}"
                for form in forms:
                    tasks.append((save_instance(inst), label, form, args.time_limit, args.gap, args.seed))
                idx += 1

    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_bench_task, tasks))
    else:
        results = [_bench_task(t) for t in tasks]

    rows = [CSV_HEADER] + [row for row, *_ in results]
    out = Path(args.out)
    out.write_text("\n".join(rows) + "\n", encoding="utf-8")

    # two-column performance profile per formulation: time, solved fraction
    per_form: dict[str, list[float]] = {f: [] for f in forms}
    counts: dict[str, int] = {f: 0 for f in forms}
    for _, status, t, form in results:
        counts[form] += 1
        if status == "optimal":
            per_form[form].append(t)
    for form in forms:
        times = sorted(per_form[form])
        lines = [f"{t:.3f} {float(k) / counts[form]:.4f}" for k, t in enumerate(times, start=1)]
        profile = out.with_name(out.stem + f"_profile_{form}.dat")
        profile.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")

    limited = any(status != "optimal" for _, status, *_ in results)
    return LIMIT_EXIT if limited else 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "generate": _cmd_generate,
        "solve": _cmd_solve,
        "oracle": _cmd_oracle,
        "verify": _cmd_verify,
        "bench": _cmd_bench,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
