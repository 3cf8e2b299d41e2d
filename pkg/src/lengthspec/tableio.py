"""CSV and JSON export of spectrum tables; JSON re-imports losslessly."""
import csv
import io
import json
from fractions import Fraction
from types import MappingProxyType

import mpmath

from .arith import PellUnit
from .spectrum import DivisorRow, SpectrumTable, SubgroupDescriptor, TraceRecord, norm_mp

FORMAT = "lengthspec-table/1"
DIGITS = 18

CSV_HEADER = ["t", "N", "length", "m", "U", "rows"]


def fmt18(x):
    if isinstance(x, float):
        x = mpmath.mpf(x)
    return mpmath.nstr(x, DIGITS, min_fixed=-30, max_fixed=30, strip_zeros=False)


def _rat(q):
    return f"{q.numerator}/{q.denominator}"


def _norm_strings(t):
    N, length = norm_mp(t, DIGITS + 12)
    return fmt18(N), fmt18(length)


def table_rows_csv(table):
    for rec in table:
        N, length = _norm_strings(rec.t)
        rows = ";".join(f"{r.u}:{r.d}:{r.h}:{r.j}:{r.M}" for r in rec.rows)
        yield [rec.t, N, length, rec.m, rec.U, rows]


def write_csv(table, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in table_rows_csv(table):
        w.writerow(row)


def table_to_json(table):
    records = []
    for rec in table:
        N, length = _norm_strings(rec.t)
        records.append({
            "t": rec.t,
            "N": N,
            "length": length,
            "m": rec.m,
            "U": rec.U,
            "mhat_coeff": _rat(rec.mhat_coeff),
            "rows": [{"u": r.u, "d": r.d, "h": r.h, "eps_d": [r.eps_d.p, r.eps_d.q],
                      "j": r.j, "M": r.M} for r in rec.rows],
        })
    return {"format": FORMAT, "subgroup": table.subgroup.to_json(),
            "t_max": table.t_max, "records": records}


def dumps(table):
    return json.dumps(table_to_json(table), indent=1)


def table_from_json(obj):
    if obj.get("format") != FORMAT:
        raise ValueError(f"not a {FORMAT} document")
    sub = SubgroupDescriptor.from_json(obj["subgroup"])
    recs = {}
    for r in obj["records"]:
        rows = tuple(DivisorRow(x["u"], x["d"], x["h"], PellUnit(x["d"], *x["eps_d"]), x["j"], x["M"])
                     for x in r["rows"])
        rec = TraceRecord(r["t"], r["U"], rows, Fraction(r["mhat_coeff"]), r["m"])
        if (r["N"], r["length"]) != _norm_strings(rec.t):
            raise ValueError(f"record t={rec.t}: stored norm disagrees with the trace")
        recs[rec.t] = rec
    t_max = obj["t_max"]
    if sorted(recs) != list(range(3, t_max + 1)):
        raise ValueError("records do not cover 3..t_max")
    return SpectrumTable(sub, t_max, MappingProxyType(recs))


def loads(text):
    return table_from_json(json.loads(text))


def rows_to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt18(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()
