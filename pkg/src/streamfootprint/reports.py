"""Report tables, run manifests and chart output.

Every table is written as delimited text (``.csv``, manifest as leading
``#`` lines) and as JSON (``.json``, manifest under ``"manifest"``). Floats
are printed with six decimals so repeated runs produce identical bytes.
"""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import __version__

FLOAT_FORMAT = "{:.6f}"


@dataclass
class Table:
    name: str
    title: str
    columns: Sequence[str]
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)


@dataclass(frozen=True)
class RunManifest:
    tool_version: str
    params_hash: str
    input_hashes: tuple
    seed: Optional[int]
    timestamp: str
    command_line: str

    def items(self):
        yield "tool_version", self.tool_version
        yield "params_sha256", self.params_hash
        for name, digest in self.input_hashes:
            yield f"input_sha256[{name}]", digest
        yield "seed", "" if self.seed is None else str(self.seed)
        yield "timestamp", self.timestamp
        yield "command_line", self.command_line

    def as_dict(self) -> dict:
        return dict(self.items())


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def run_timestamp(input_paths: Sequence) -> str:
    """``SOURCE_DATE_EPOCH`` if set, else the newest input mtime (epoch 0 if none).

    Never the wall clock, so a rerun on unchanged inputs is byte-identical.
    """
    env = os.environ.get("SOURCE_DATE_EPOCH")
    if env is not None:
        seconds = int(env)
    else:
        seconds = max((int(Path(p).stat().st_mtime) for p in input_paths), default=0)
    stamp = _dt.datetime.fromtimestamp(seconds, tz=_dt.timezone.utc)
    return stamp.strftime("%Y-%m-%dT%H:%M:%SZ")


def make_manifest(params_text: str, inputs: Sequence, seed: Optional[int], argv: Sequence[str]) -> RunManifest:
    paths = [p for p in inputs if p is not None]
    return RunManifest(
        tool_version=__version__,
        params_hash=sha256_text(params_text),
        input_hashes=tuple((Path(p).name, sha256_file(p)) for p in paths),
        seed=seed,
        timestamp=run_timestamp(paths),
        command_line=" ".join(["streamfootprint", *argv]),
    )


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        out = FLOAT_FORMAT.format(value)
        return "0.000000" if out == "-0.000000" else out
    return str(value)


def _json_value(value):
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(fmt(value))
    return value


def render_delimited(table: Table, manifest: Optional[RunManifest] = None) -> str:
    buf = io.StringIO()
    if manifest is not None:
        for key, value in manifest.items():
            buf.write(f"# {key}: {value}\n")
    buf.write(f"# report: {table.name}\n")
    for note in table.notes:
        buf.write(f"# note: {note}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def render_text(table: Table) -> str:
    cells = [list(table.columns)] + [[fmt(v) for v in row] for row in table.rows]
    widths = [max(len(r[j]) for r in cells) for j in range(len(table.columns))]
    lines = [table.title, "=" * len(table.title)]
    for i, row in enumerate(cells):
        lines.append("  ".join(c.rjust(w) if i and _numeric(c) else c.ljust(w)
                               for c, w in zip(row, widths)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    for note in table.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def _numeric(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def render_json(table: Table, manifest: Optional[RunManifest] = None) -> str:
    doc = {
        "report": table.name,
        "title": table.title,
        "manifest": manifest.as_dict() if manifest else None,
        "notes": list(table.notes),
        "columns": list(table.columns),
        "rows": [[_json_value(v) for v in row] for row in table.rows],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def write_table(table: Table, out_dir, manifest: Optional[RunManifest]) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{table.name}.csv"
    json_path = out / f"{table.name}.json"
    csv_path.write_text(render_delimited(table, manifest), encoding="utf-8")
    json_path.write_text(render_json(table, manifest), encoding="utf-8")
    return [csv_path, json_path]


def write_bar_chart(path, title: str, labels: Sequence[str], stacks: dict, hours: Sequence[float],
                    manifest: Optional[RunManifest] = None) -> Path:
    """Stacked GWP bars (one stack per component) with hours on a second axis."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "streamfootprint"
    fig, ax = plt.subplots(figsize=(max(6.0, 0.9 * len(labels) + 2), 4.5))
    bottom = [0.0] * len(labels)
    x = list(range(len(labels)))
    for name, values in stacks.items():
        ax.bar(x, values, bottom=bottom, label=name, width=0.6)
        bottom = [b + v for b, v in zip(bottom, values)]
    ax.set_ylabel("GWP [kg CO2-eq. / week]")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_title(title)
    ax2 = ax.twinx()
    ax2.plot(x, hours, "o", color="black", label="duration")
    ax2.set_ylabel("streaming duration [h / week]")
    ax2.set_ylim(bottom=0)
    handles = ax.get_legend_handles_labels()
    handles2 = ax2.get_legend_handles_labels()
    ax.legend(handles[0] + handles2[0], handles[1] + handles2[1], loc="upper right", fontsize="small")
    fig.tight_layout()
    metadata = {"Date": None}
    if manifest is not None:
        metadata["Description"] = "; ".join(f"{k}={v}" for k, v in manifest.items())
    path = Path(path)
    fig.savefig(path, format="svg", metadata=metadata)
    plt.close(fig)
    return path
