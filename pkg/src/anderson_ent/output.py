"""CSV emission and the run manifest.

Every output file starts with ``#`` comment lines carrying the manifest
(version, command, resolved parameters, outputs), then a header row and
data rows.  Floats are rendered with 17 significant digits, so a written
file reparses to bit-identical values; rerunning the same command with
the same seed produces byte-identical bodies (comment lines may carry a
timestamp unless suppressed).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

__all__ = ["RunManifest", "format_value", "write_csv", "read_csv",
           "parse_config_text"]


def format_value(value) -> str:
    """Render one value: floats round-trip exactly, bools become 0/1."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, (tuple, list, np.ndarray)):
        return ",".join(format_value(v) for v in value)
    return str(value)


@dataclass
class RunManifest:
    """Provenance of one CLI run, echoed into every output file."""

    command: str
    params: dict
    seed: int
    version: str
    outputs: list[str] = field(default_factory=list)
    walltime_s: float | None = None

    def config_text(self) -> str:
        """The resolved parameters as config-file syntax (one key per line)."""
        return "".join(
            f"{key} = {format_value(val)}\n" for key, val in sorted(self.params.items())
        )

    def comment_lines(self, no_timestamp: bool = False) -> list[str]:
        lines = [
            f"anderson-ent v{self.version}",
            f"command: {self.command}",
            f"seed: {self.seed}",
        ]
        if not no_timestamp:
            lines.append("written: " + time.strftime("%Y-%m-%dT%H:%M:%S%z"))
        lines += [f"param: {ln}" for ln in self.config_text().splitlines()]
        lines += [f"output: {path}" for path in self.outputs]
        if self.walltime_s is not None:
            lines.append(f"walltime_s: {format_value(self.walltime_s)}")
        return lines


def write_csv(path, columns: dict, manifest: RunManifest | None = None,
              no_timestamp: bool = False) -> None:
    """Write named columns as CSV with the manifest in header comments.

    ``columns`` maps names to equal-length sequences.  Raises
    ConfigError on empty or ragged input; I/O errors propagate with the
    path in the message.
    """
    if not columns:
        raise ConfigError("refusing to write a CSV without columns")
    names = list(columns)
    cols = [np.atleast_1d(np.asarray(columns[name])) for name in names]
    length = cols[0].shape[0]
    if any(c.shape[0] != length for c in cols):
        raise ConfigError("all CSV columns must have the same length")
    if length == 0:
        raise ConfigError("refusing to write a CSV without rows")
    lines = []
    if manifest is not None:
        lines += ["# " + ln for ln in manifest.comment_lines(no_timestamp)]
    lines.append(",".join(names))
    for i in range(length):
        lines.append(",".join(format_value(c[i]) for c in cols))
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def read_csv(path):
    """Parse a CSV written by :func:`write_csv`.

    Returns ``(comments, columns)`` where ``comments`` is the list of
    stripped ``#`` lines and ``columns`` maps each header name to a
    float64 array (or a list of strings for non-numeric columns).
    """
    comments = []
    header = None
    rows = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for raw in fh:
                line = raw.rstrip("\n")
                if not line:
                    continue
                if line.startswith("#"):
                    comments.append(line[1:].strip())
                elif header is None:
                    header = line.split(",")
                else:
                    rows.append(line.split(","))
    except OSError as exc:
        raise OSError(f"cannot read CSV from {path}: {exc}") from exc
    if header is None:
        raise ConfigError(f"{path} has no header row")
    columns = {}
    for j, name in enumerate(header):
        raw = [row[j] for row in rows]
        try:
            columns[name] = np.array([float(v) for v in raw])
        except ValueError:
            columns[name] = raw
    return comments, columns


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment, blanks skipped."""
    result: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"config line {lineno}: empty key")
        result[key] = value.strip()
    return result
