"""Metric records and their stable CSV schema."""

import csv
import io
import os
from dataclasses import dataclass, fields

from filelock import FileLock

CSV_HEADER = (
    "run_id,algo,config_hash,epoch,level,k_steps,sigma_init,episodes,"
    "success_rate,mean_latency_us,p99_latency_us,loss_fm,loss_ae,loss_ic,loss_total"
)
_COLUMNS = CSV_HEADER.split(",")


@dataclass
class MetricRecord:
    run_id: str = ""
    algo: str = ""
    config_hash: str = ""
    epoch: int = None
    level: int = None
    k_steps: int = None
    sigma_init: float = None
    episodes: int = None
    success_rate: float = None
    mean_latency_us: float = None
    p99_latency_us: float = None
    loss_fm: float = None
    loss_ae: float = None
    loss_ic: float = None
    loss_total: float = None

    def row(self):
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            out.append("" if v is None else str(v))
        return out

    @classmethod
    def from_row(cls, row):
        kwargs = {}
        for f, raw in zip(fields(cls), row):
            if raw == "":
                kwargs[f.name] = None
            elif f.name in ("epoch", "level", "k_steps", "episodes"):
                kwargs[f.name] = int(raw)
            elif f.name in ("run_id", "algo", "config_hash"):
                kwargs[f.name] = raw
            else:
                kwargs[f.name] = float(raw)
        return cls(**kwargs)


def _render(records, include_header):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if include_header:
        writer.writerow(_COLUMNS)
    for rec in records:
        writer.writerow(rec.row())
    return buf.getvalue()


def write_records(path, records):
    with open(path, "w") as fh:
        fh.write(_render(records, include_header=True))


def append_records(path, records):
    """Append rows under a file lock; creates the file with a header."""
    lock = FileLock(str(path) + ".lock")
    with lock:
        fresh = not os.path.exists(path) or os.path.getsize(path) == 0
        with open(path, "a") as fh:
            fh.write(_render(records, include_header=fresh))
            fh.flush()
            os.fsync(fh.fileno())


def read_records(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != _COLUMNS:
        raise ValueError(f"{path}: unexpected metrics CSV header")
    return [MetricRecord.from_row(r) for r in rows[1:]]
