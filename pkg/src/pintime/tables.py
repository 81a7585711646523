"""Result tables: CSV (canonical) and markdown (presentation) output."""
import csv
import io
import math
from dataclasses import dataclass, field


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values, table has {len(self.columns)} columns")
        self.rows.append(list(values))

    def column(self, name):
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def format_value(value, precision=3):
    """Render one cell; ``precision=0`` keeps full round-trip precision."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if precision <= 0:
            return repr(value)
        return f"{value:.{precision}g}"
    return str(value)


def parse_value(text):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def to_csv(table, precision=3):
    buf = io.StringIO()
    for key, value in table.meta.items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(v, precision) for v in row])
    return buf.getvalue()


def from_csv(text):
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(": ")
            meta[key] = value
        elif line.strip():
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    rows = [[parse_value(cell) for cell in row] for row in reader]
    return Table(columns, rows, meta)


def to_markdown(table, precision=3):
    lines = [f"<!-- {k}: {v} -->" for k, v in table.meta.items()]
    lines.append("| " + " | ".join(table.columns) + " |")
    lines.append("|" + "|".join("---" for _ in table.columns) + "|")
    for row in table.rows:
        cells = [format_value(v, precision) or "---" for v in row]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def render(table, fmt="csv", precision=3):
    if fmt == "csv":
        return to_csv(table, precision)
    if fmt == "markdown":
        return to_markdown(table, precision)
    raise ValueError(f"unknown format {fmt!r}")
