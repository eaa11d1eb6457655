"""Readers and writers for the plain-text pose file formats.

Formats (all UTF-8, whitespace-separated tokens, floats written with six
fractional digits, one trailing newline per record):

* vertex file: one ``x y`` pair per non-empty line, line i = vertex i;
* vertex order file: line i lists the visitation steps of vertex i;
* dense trajectory: nine floats per line, protagonist XYZ, camera XYZ,
  rotation XYZ;
* capture manifest: ``<image name> <camera XYZ> <rotation XYZ>`` data
  lines, preceded by ``# key value`` header lines carrying the capture
  conditions (plain comments to third-party readers);
* reconstruction: ``<image name> <position XYZ>`` per line;
* alignment report: ``key value`` lines followed by per-point
  ``residual <name> <meters> <inlier 0|1>`` lines.

Readers accept runs of spaces/tabs, blank lines, and both LF and CRLF;
writers emit single spaces and LF.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .align import AlignmentReport, SimilarityTransform
from .conditions import ConditionSet, TimeOfDay, Weather
from .errors import (
    DanglingVertexRef,
    DuplicateImageName,
    ParseError,
    WrongFieldCount,
)
from .trajectory import (
    DenseTrajectory,
    EulerRotation,
    SparseTrajectory,
    expand_visitation,
)

_TOKEN = re.compile(r"\S+")


def _tokens(line: str) -> list[tuple[str, int]]:
    """Tokens of a line with their 1-based start columns."""
    return [(m.group(), m.start() + 1) for m in _TOKEN.finditer(line)]


def _data_lines(text: str):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        if raw.strip():
            yield line_no, raw


def _float(token: str, line_no: int, column: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"invalid float {token!r}", line=line_no, column=column) from None


def _int(token: str, line_no: int, column: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"invalid integer {token!r}", line=line_no, column=column) from None


def _f(value: float) -> str:
    return f"{value:.6f}"


# --------------------------------------------------------------------------
# Sparse trajectory (vertex + visitation order files)
# --------------------------------------------------------------------------

def read_sparse(vertex_text: str, order_text: str) -> SparseTrajectory:
    """Parse vertex and visitation-order files into a sparse trajectory.

    The result is validated: its steps must cover 1..S exactly once over
    existing vertices, otherwise the matching InvariantViolation is
    raised.
    """
    vertices = []
    for line_no, raw in _data_lines(vertex_text):
        tokens = _tokens(raw)
        if len(tokens) != 2:
            raise WrongFieldCount(line_no, expected=2, got=len(tokens))
        vertices.append(tuple(_float(t, line_no, c) for t, c in tokens))
    if not vertices:
        raise ParseError("vertex file contains no vertices", line=1)

    # The order file is positional: line i holds the steps of vertex i,
    # a blank line leaves that vertex unvisited. Trailing blanks are noise.
    order_lines = order_text.splitlines()
    while order_lines and not order_lines[-1].strip():
        order_lines.pop()
    orders: list[tuple[int, ...]] = []
    for line_no, raw in enumerate(order_lines, start=1):
        orders.append(tuple(_int(t, line_no, c) for t, c in _tokens(raw)))
    if len(orders) > len(vertices):
        raise DanglingVertexRef(
            f"order file lists {len(orders)} vertices, vertex file only {len(vertices)}"
        )
    orders.extend(() for _ in range(len(vertices) - len(orders)))

    sparse = SparseTrajectory(np.array(vertices), tuple(orders))
    expand_visitation(sparse)  # validates the step cover
    return sparse


# --------------------------------------------------------------------------
# Dense trajectory
# --------------------------------------------------------------------------

def write_dense(dense: DenseTrajectory) -> str:
    rows = np.hstack([dense.protagonist, dense.camera, dense.rotation])
    return "".join(" ".join(_f(v) for v in row) + "\n" for row in rows)


def read_dense(text: str, fps: float = 60.0) -> DenseTrajectory:
    """Parse a dense trajectory; the frame rate is not stored in the file."""
    rows = []
    for line_no, raw in _data_lines(text):
        tokens = _tokens(raw)
        if len(tokens) != 9:
            raise WrongFieldCount(line_no, expected=9, got=len(tokens))
        rows.append([_float(t, line_no, c) for t, c in tokens])
    if not rows:
        raise ParseError("trajectory file contains no pose lines", line=1)
    data = np.array(rows)
    return DenseTrajectory(data[:, 0:3], data[:, 3:6], data[:, 6:9], fps=fps)


# --------------------------------------------------------------------------
# Capture manifest
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CaptureRecord:
    """One captured frame: synthetic image name plus camera pose."""

    image_name: str
    camera_pos: tuple[float, float, float]
    camera_rot: EulerRotation

    def __post_init__(self):
        if not self.image_name or any(ch.isspace() for ch in self.image_name):
            raise ValueError(f"image name must be non-empty without whitespace: {self.image_name!r}")
        object.__setattr__(self, "camera_pos", tuple(float(v) for v in self.camera_pos))


@dataclass(frozen=True)
class CaptureManifest:
    """Frame-ordered capture records tagged with their condition set."""

    records: tuple[CaptureRecord, ...]
    conditions: ConditionSet = field(default_factory=ConditionSet)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        seen = set()
        for record in self.records:
            if record.image_name in seen:
                raise DuplicateImageName(record.image_name)
            seen.add(record.image_name)


def write_manifest(manifest: CaptureManifest) -> str:
    cond = manifest.conditions
    lines = [
        f"# weather {cond.weather.value}",
        f"# time_of_day {cond.time_of_day.value}",
        f"# vehicle_density {_f(cond.vehicle_density)}",
        f"# pedestrian_density {_f(cond.pedestrian_density)}",
    ]
    for r in manifest.records:
        px, py, pz = r.camera_pos
        lines.append(
            f"{r.image_name} {_f(px)} {_f(py)} {_f(pz)} "
            f"{_f(r.camera_rot.rx)} {_f(r.camera_rot.ry)} {_f(r.camera_rot.rz)}"
        )
    return "\n".join(lines) + "\n"


def read_manifest(text: str) -> CaptureManifest:
    weather_names = {w.value: w for w in Weather}
    time_names = {t.value: t for t in TimeOfDay}
    cond_kwargs: dict = {}
    records = []
    seen: set[str] = set()
    for line_no, raw in _data_lines(text):
        stripped = raw.strip()
        if stripped.startswith("#"):
            tokens = stripped[1:].split()
            if len(tokens) != 2:
                continue  # plain comment
            key, value = tokens
            if key == "weather":
                if value not in weather_names:
                    raise ParseError(f"unknown weather {value!r}", line=line_no)
                cond_kwargs["weather"] = weather_names[value]
            elif key == "time_of_day":
                if value not in time_names:
                    raise ParseError(f"unknown time_of_day {value!r}", line=line_no)
                cond_kwargs["time_of_day"] = time_names[value]
            elif key in ("vehicle_density", "pedestrian_density"):
                cond_kwargs[key] = _float(value, line_no, stripped.index(value) + 1)
            continue
        tokens = _tokens(raw)
        if len(tokens) != 7:
            raise WrongFieldCount(line_no, expected=7, got=len(tokens))
        name = tokens[0][0]
        if name in seen:
            raise DuplicateImageName(name, line=line_no)
        seen.add(name)
        values = [_float(t, line_no, c) for t, c in tokens[1:]]
        records.append(
            CaptureRecord(name, tuple(values[0:3]), EulerRotation(*values[3:6]))
        )
    return CaptureManifest(tuple(records), ConditionSet(**cond_kwargs))


# --------------------------------------------------------------------------
# Reconstructed camera positions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ReconstructedSet:
    """Externally reconstructed camera positions, in reconstruction-frame units."""

    entries: tuple[tuple[str, tuple[float, float, float]], ...]

    def __post_init__(self):
        entries = tuple((name, tuple(float(v) for v in pos)) for name, pos in self.entries)
        seen = set()
        for name, _ in entries:
            if name in seen:
                raise DuplicateImageName(name)
            seen.add(name)
        object.__setattr__(self, "entries", entries)

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.entries)

    def positions(self) -> np.ndarray:
        return np.array([pos for _, pos in self.entries], dtype=float).reshape(-1, 3)


def read_reconstruction(text: str) -> ReconstructedSet:
    """Parse ``name x y z`` lines; an empty file is a valid empty set."""
    entries = []
    seen: set[str] = set()
    for line_no, raw in _data_lines(text):
        if raw.strip().startswith("#"):
            continue
        tokens = _tokens(raw)
        if len(tokens) != 4:
            raise WrongFieldCount(line_no, expected=4, got=len(tokens))
        name = tokens[0][0]
        if name in seen:
            raise DuplicateImageName(name, line=line_no)
        seen.add(name)
        entries.append((name, tuple(_float(t, line_no, c) for t, c in tokens[1:])))
    return ReconstructedSet(tuple(entries))


def write_reconstruction(recon: ReconstructedSet) -> str:
    return "".join(
        f"{name} {_f(x)} {_f(y)} {_f(z)}\n" for name, (x, y, z) in recon.entries
    )


# --------------------------------------------------------------------------
# Alignment report
# --------------------------------------------------------------------------

def _g(value: float) -> str:
    return format(float(value), ".12g")


def write_report(report: AlignmentReport) -> str:
    t = report.transform
    lines = [
        "scale " + _g(t.scale),
        "rotation " + " ".join(_g(v) for v in t.rotation.ravel()),
        "translation " + " ".join(_g(v) for v in t.translation),
        "meters_per_unit " + _g(report.meters_per_unit),
        "average_error_m " + _g(report.average_error_m),
        "median_error_m " + _g(report.median_error_m),
        f"inlier_count {int(report.inlier_mask.sum())}",
        f"total_count {len(report.residuals_m)}",
    ]
    for name, res, inlier in zip(report.names, report.residuals_m, report.inlier_mask):
        lines.append(f"residual {name} {_g(res)} {1 if inlier else 0}")
    return "\n".join(lines) + "\n"


def read_report(text: str) -> AlignmentReport:
    values: dict[str, list[str]] = {}
    names: list[str] = []
    residuals: list[float] = []
    inliers: list[bool] = []
    for line_no, raw in _data_lines(text):
        tokens = raw.split()
        key = tokens[0]
        if key == "residual":
            if len(tokens) != 4:
                raise WrongFieldCount(line_no, expected=4, got=len(tokens))
            names.append(tokens[1])
            residuals.append(_float(tokens[2], line_no, 1))
            inliers.append(tokens[3] == "1")
        else:
            values[key] = tokens[1:]
    try:
        transform = SimilarityTransform(
            float(values["scale"][0]),
            np.array([float(v) for v in values["rotation"]]).reshape(3, 3),
            np.array([float(v) for v in values["translation"]]),
        )
        return AlignmentReport(
            transform=transform,
            inlier_mask=np.array(inliers, dtype=bool),
            residuals_m=np.array(residuals, dtype=float),
            average_error_m=float(values["average_error_m"][0]),
            median_error_m=float(values["median_error_m"][0]),
            meters_per_unit=float(values["meters_per_unit"][0]),
            names=tuple(names),
        )
    except (KeyError, IndexError, ValueError) as exc:
        raise ParseError(f"incomplete or malformed report: {exc}") from None
