"""Result rows and their CSV / newline-delimited text serialisation."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from ..config import SystemConfig

COLUMNS = ("variant", "Ka", "M", "S", "J", "np", "nc", "G", "V", "ebn0_db",
           "pe", "pmd", "pfa", "ci_lo", "ci_hi", "trials", "source", "seed")
FORMATS = ("csv", "ndtext")


@dataclass(frozen=True)
class ResultRow:
    variant: str
    Ka: int
    M: int
    S: int
    J: int
    np: int
    nc: int
    G: int
    V: int
    ebn0_db: float
    pe: float
    pmd: float
    pfa: float
    ci_lo: float
    ci_hi: float
    trials: int
    source: str
    seed: int

    @classmethod
    def for_config(cls, cfg: SystemConfig, pe, pmd, pfa, ci_lo, ci_hi, trials, source) -> "ResultRow":
        return cls(cfg.variant, cfg.K_a, cfg.M, cfg.S, cfg.J, cfg.n_p, cfg.n_c, cfg.G, cfg.V,
                   float(cfg.ebn0_db), float(pe), float(pmd), float(pfa), float(ci_lo),
                   float(ci_hi), int(trials), source, int(cfg.seed))


assert tuple(f.name for f in fields(ResultRow)) == COLUMNS


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(round(value, 12))
    return str(value)


def to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_cell(getattr(row, c)) for c in COLUMNS])
    return buf.getvalue()


def to_ndtext(rows) -> str:
    """One JSON object per line, keys in column order."""
    return "".join(json.dumps(asdict(row)) + "\n" for row in rows)


def from_csv(text: str) -> list:
    reader = csv.DictReader(io.StringIO(text))
    types = {f.name: f.type for f in fields(ResultRow)}
    conv = {"int": int, "float": float, "str": str}
    return [ResultRow(**{k: conv[types[k]](v) for k, v in rec.items()}) for rec in reader]


def emit_results(rows, path, fmt: str = "csv", config: SystemConfig | None = None) -> Path:
    """Write ``rows`` to ``path``; the resolved config goes to ``path + '.config'``."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
    path = Path(path)
    text = to_csv(rows) if fmt == "csv" else to_ndtext(rows)
    path.write_text(text)
    if config is not None:
        Path(str(path) + ".config").write_text(config.to_text())
    return path
