"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage or IO error.
"""
import argparse
import json
import logging
import math
import sys

import numpy as np

from . import tableio
from ._jit import default_workers, set_workers
from .spectrum import KINDS, MTableError, SubgroupDescriptor, TableBuildError, UnknownMError, build_table, load_mtable

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

logger = logging.getLogger("lengthspec")


class UsageError(Exception):
    pass


def _subgroup(args):
    if args.mtable:
        try:
            sub = load_mtable(args.mtable, kind=args.gamma if args.gamma != "full" else "custom")
        except FileNotFoundError:
            raise UsageError(f"M-table file not found: {args.mtable}")
        except OSError as exc:
            raise UsageError(f"cannot read M-table {args.mtable}: {exc}")
        if args.index is not None and args.index != sub.index:
            raise UsageError(f"--index {args.index} disagrees with {args.mtable} (INDEX {sub.index})")
        return sub
    if args.gamma == "full":
        return SubgroupDescriptor()
    if args.gamma == "custom":
        raise UsageError("--gamma custom requires --mtable")
    if args.index is None:
        raise UsageError(f"--gamma {args.gamma} requires --index")
    return SubgroupDescriptor(args.gamma, args.level, args.index)


def _emit(args, text, summary):
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc}")
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)


def _rows_out(args, command, params, header, rows):
    if args.format == "json":
        doc = {"command": command, "params": params,
               "rows": [dict(zip(header, r)) for r in rows]}
        return json.dumps(doc, indent=1) + "\n"
    return tableio.rows_to_csv(header, rows)


def _t_for_x(x):
    # N(t) > t^2 - 2, so t_max = isqrt(x) + 2 covers every norm below x
    return math.isqrt(int(math.ceil(x))) + 2


def cmd_table(args):
    sub = _subgroup(args)
    tab = build_table(sub, args.tmax)
    if args.format == "json":
        text = tableio.dumps(tab) + "\n"
    else:
        import io
        buf = io.StringIO()
        tableio.write_csv(tab, buf)
        text = buf.getvalue()
    _emit(args, text, f"table t<={args.tmax}: {len(tab)} traces, subgroup={sub.kind}(K={sub.level}), "
                      f"sum m = {sum(r.m for r in tab)}")
    return EXIT_OK


def cmd_powersums(args):
    from .analysis import li_k, pi_k_series
    sub = _subgroup(args)
    tab = build_table(sub, args.tmax or _t_for_x(args.xmax))
    xs = np.geomspace(args.xmin, args.xmax, args.points)
    pis = pi_k_series(tab, args.k, xs)
    rows = []
    for x, p in zip(xs, pis):
        li = li_k(x ** ((args.k + 1) / 2), args.k)
        rows.append([float(x), p, li, p / li if li > 0 else float("nan")])
    text = _rows_out(args, "powersums", {"k": args.k}, ["x", "pi_k", "li_k", "ratio"], rows)
    final = rows[-1]
    extra = f", pi/x^(1/2)={final[1] / math.sqrt(final[0]):.6f}" if args.k == 0 else ""
    _emit(args, text, f"powersums k={args.k}: final ratio {final[3]:.6f} at x={final[0]:.6g}{extra}")
    return EXIT_OK


def cmd_psi(args):
    from .analysis import psi_series
    sub = _subgroup(args)
    tab = build_table(sub, args.T)
    Ts = sorted({int(round(v)) for v in np.geomspace(3, args.T, args.points)})
    lit = psi_series(tab, args.k, Ts, "lemma-literal")
    der = psi_series(tab, args.k, Ts, "mhat-derived")
    rows = [[T, a, b, b / a if a else float("nan")] for T, a, b in zip(Ts, lit, der)]
    text = _rows_out(args, "psi", {"k": args.k},
                     ["T", "lemma_literal", "mhat_derived", "ratio"], rows)
    _emit(args, text, f"psi k={args.k} T={args.T}: literal={lit[-1]:.6f} "
                      f"mhat-derived={der[-1]:.6f} ratio={rows[-1][3]:.6f} (2^k={2 ** args.k})")
    return EXIT_OK


def cmd_constants(args):
    from .analysis import estimate_c
    sub = _subgroup(args)
    tab = build_table(sub, args.tmax or _t_for_x(args.xmax))
    xs = np.geomspace(args.xmax / 2 ** args.doublings, args.xmax, args.points)
    rep = estimate_c(tab, args.k, xs)
    if args.format == "json":
        text = json.dumps({"command": "constants", "k": rep.k, "c": rep.c,
                           "stability": rep.stability, "notes": rep.notes,
                           "rows": [dict(zip(["x", "pi_k", "li_k", "ratio"], r)) for r in rep.rows()]},
                          indent=1) + "\n"
    else:
        text = tableio.rows_to_csv(["x", "pi_k", "li_k", "ratio"], rep.rows())
    _emit(args, text, f"constants k={rep.k}: c~{rep.c:.6f} stability={rep.stability:.3e}")
    return EXIT_OK


def cmd_phi(args):
    from .lfunc import ProgressionSpec, progression, l_values_at_traces
    nu = tuple(int(v) for v in args.nu.split(",")) if args.nu else ()
    spec = ProgressionSpec(args.K, nu)
    ts = progression(spec, args.T)
    lv = np.asarray(l_values_at_traces(ts)) ** args.k if ts else np.zeros(0)
    cum = np.cumsum(lv)
    grid = sorted({int(round(v)) for v in np.geomspace(max(3, args.T / 2 ** 4), args.T, args.points)}
                  | {max(3, args.T // 2)})
    rows = []
    for T in grid:
        n = int(np.searchsorted(ts, T, side="right"))
        phi = float(cum[n - 1]) if n else 0.0
        rows.append([T, n, phi, phi / T])
    text = _rows_out(args, "phi", {"K": spec.K, "nu": list(spec.nu), "mu": spec.mu, "k": args.k},
                     ["T", "terms", "phi", "a_estimate"], rows)
    half = [r for r in rows if r[0] <= args.T // 2]
    drift = ""
    if half and half[-1][3]:
        drift = f", drift vs T={half[-1][0]}: {abs(rows[-1][3] - half[-1][3]) / half[-1][3]:.4f}"
    _emit(args, text, f"phi K={spec.K} nu={spec.nu} k={args.k}: a~{rows[-1][3]:.6f}{drift}")
    return EXIT_OK


def cmd_bounds(args):
    from .analysis import bound_report
    sub = _subgroup(args)
    rep = bound_report(build_table(sub, args.tmax))
    if args.format == "json":
        text = json.dumps(rep, indent=1) + "\n"
    else:
        rows = []
        for key, v in rep.items():
            if isinstance(v, dict):
                rows.append([key, v["value"], v["t"]])
            elif isinstance(v, (int, float)) or v is None:
                rows.append([key, v, ""])
        text = tableio.rows_to_csv(["quantity", "value", "witness_t"], rows)
    _emit(args, text, f"bounds t<={args.tmax}: max m/N^(3/4)={rep['max_m_over_N34']['value']:.4f}")
    return EXIT_OK


def cmd_oracle_check(args):
    from .oracle import enumerate_classes
    if not 3 <= args.tmax <= 200:
        raise UsageError("--tmax for oracle-check must be in [3, 200]")
    tab = build_table(SubgroupDescriptor(), args.tmax)
    orc = enumerate_classes(args.tmax)
    rows = [[t, orc[t], tab.records[t].m, orc[t] == tab.records[t].m] for t in range(3, args.tmax + 1)]
    text = _rows_out(args, "oracle-check", {"tmax": args.tmax},
                     ["t", "oracle", "spectrum", "match"], rows)
    bad = [r[0] for r in rows if not r[3]]
    _emit(args, text, f"oracle-check t<={args.tmax}: {len(bad)} mismatches" + (f" at {bad[:10]}" if bad else ""))
    return EXIT_FAIL if bad else EXIT_OK


def cmd_verify(args):
    from . import acceptance
    ids = {int(x) for x in args.only.split(",")} if args.only else None
    results = acceptance.run(ids=ids, tier=args.tier)
    for r in results:
        print(r.line())
    report = {"tier": args.tier, "passed": all(r.passed for r in results),
              "criteria": [r.to_json() for r in results]}
    if args.report:
        try:
            with open(args.report, "w") as fh:
                json.dump(report, fh, indent=1, default=str)
        except OSError as exc:
            raise UsageError(f"cannot write {args.report}: {exc}")
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} criteria passed")
    return EXIT_OK if n_fail == 0 else EXIT_FAIL


def _positive(kind):
    def conv(text):
        try:
            v = kind(float(text)) if kind is int else kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text}")
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text}")
        return v
    return conv


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gamma", choices=KINDS, default="full", help="subgroup family")
    common.add_argument("--level", type=_positive(int), default=1)
    common.add_argument("--index", type=_positive(int), default=None)
    common.add_argument("--mtable", default=None, help="M-table file (K <level> INDEX <index> header)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", "-o", default=None, help="output file (default stdout)")
    common.add_argument("--workers", type=_positive(int), default=None,
                        help="worker threads (default $LENGTHSPEC_WORKERS or CPU count)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="lengthspec", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("table", parents=[common], help="length spectrum table")
    s.add_argument("--tmax", type=_positive(int), required=True)
    s.set_defaults(func=cmd_table)

    s = sub.add_parser("powersums", parents=[common], help="pi^(k)(x) against li_k")
    s.add_argument("-k", type=_nonneg_int, default=1)
    s.add_argument("--xmax", type=_positive(float), required=True)
    s.add_argument("--xmin", type=_positive(float), default=10.0)
    s.add_argument("--points", type=_positive(int), default=20)
    s.add_argument("--tmax", type=_positive(int), default=None)
    s.set_defaults(func=cmd_powersums)

    s = sub.add_parser("psi", parents=[common], help="L-value power sums, both variants")
    s.add_argument("-k", type=_positive(int), default=1)
    s.add_argument("-T", type=_positive(int), required=True)
    s.add_argument("--points", type=_positive(int), default=20)
    s.set_defaults(func=cmd_psi)

    s = sub.add_parser("constants", parents=[common], help="asymptotic constant estimate")
    s.add_argument("-k", type=_nonneg_int, default=2)
    s.add_argument("--xmax", type=_positive(float), required=True)
    s.add_argument("--doublings", type=_positive(int), default=4)
    s.add_argument("--points", type=_positive(int), default=9)
    s.add_argument("--tmax", type=_positive(int), default=None)
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("phi", parents=[common], help="L-value sums over a trace progression")
    s.add_argument("-K", type=_positive(int), default=1)
    s.add_argument("--nu", default=None, help="comma list of +2/-2, one per prime of K")
    s.add_argument("-k", type=_positive(int), default=1)
    s.add_argument("-T", type=_positive(int), required=True)
    s.add_argument("--points", type=_positive(int), default=12)
    s.set_defaults(func=cmd_phi)

    s = sub.add_parser("bounds", parents=[common], help="multiplicity envelope report")
    s.add_argument("--tmax", type=_positive(int), required=True)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("oracle-check", parents=[common], help="compare with brute-force word counts")
    s.add_argument("--tmax", type=_positive(int), default=20)
    s.set_defaults(func=cmd_oracle_check)

    s = sub.add_parser("verify", parents=[common], help="run the acceptance criteria")
    s.add_argument("--tier", choices=("oracle", "fast", "full"), default="full")
    s.add_argument("--only", default=None, help="comma list of criterion ids")
    s.add_argument("--report", default=None, help="write a JSON report here")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    set_workers(args.workers or default_workers())
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lengthspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MTableError, UnknownMError) as exc:
        print(f"lengthspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TableBuildError as exc:
        cause = exc.__cause__
        code = EXIT_USAGE if isinstance(cause, (UnknownMError, MTableError)) else EXIT_FAIL
        print(f"lengthspec: error: {exc}", file=sys.stderr)
        return code
    except ValueError as exc:
        print(f"lengthspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
