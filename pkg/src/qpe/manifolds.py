"""Sample grids on simple manifolds, CSV ingestion, and preprocessing."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .entropy import simplex_map
from .errors import IngestionError, ShapeError, ValidationError


@dataclass(frozen=True)
class PreprocessStep:
    """One transformation; ``features`` selects columns (None means all).

    kind is one of ``sigmoid_scale_2pi``, ``divide_by``, ``affine``,
    ``max_abs``, ``simplex_e``, ``scale_to_range``. ``simplex_e`` is
    row-local and always acts on every column.
    """

    kind: str
    params: tuple[float, ...] = ()
    features: tuple[Union[int, str], ...] | None = None

    def describe(self) -> str:
        args = ",".join(f"{p:g}" for p in self.params)
        sel = "" if self.features is None else "@" + "|".join(map(str, self.features))
        return f"{self.kind}({args}){sel}"


KINDS = {"sigmoid_scale_2pi": 0, "divide_by": 1, "affine": 2, "max_abs": 0, "simplex_e": 0, "scale_to_range": 2}


def SigmoidScale2Pi(features=None) -> PreprocessStep:
    return PreprocessStep("sigmoid_scale_2pi", (), _sel(features))


def DivideBy(c: float, features=None) -> PreprocessStep:
    return PreprocessStep("divide_by", (float(c),), _sel(features))


def Affine(a: float, b: float, features=None) -> PreprocessStep:
    """v -> a v + b"""
    return PreprocessStep("affine", (float(a), float(b)), _sel(features))


def MaxAbs(features=None) -> PreprocessStep:
    return PreprocessStep("max_abs", (), _sel(features))


def SimplexE() -> PreprocessStep:
    return PreprocessStep("simplex_e")


def ScaleToRange(lo: float, hi: float, features=None) -> PreprocessStep:
    """Map unit-interval values v to lo + (hi - lo) v."""
    return PreprocessStep("scale_to_range", (float(lo), float(hi)), _sel(features))


def _sel(features):
    if features is None:
        return None
    if isinstance(features, (str, int)):
        return (features,)
    return tuple(features)


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray
    feature_names: tuple[str, ...] | None = None
    provenance: tuple[str, ...] = ()
    labels: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise ShapeError(f"points must form an (n, d) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("point cloud contains non-finite values")
        if self.feature_names is not None and len(self.feature_names) != pts.shape[1]:
            raise ShapeError("feature_names length does not match point dimension")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        return iter(self.points)


# --- samplers ---------------------------------------------------------------


@dataclass(frozen=True)
class IntervalGrid:
    a: float
    b: float
    n: int = 1000
    closed_left: bool = True
    closed_right: bool = True


@dataclass(frozen=True)
class SquareGrid:
    """Product grid on [a, b)^2 (or closed, per flags) with an optional hole."""

    a: float
    b: float
    n_per_axis: int = 100
    exclude_center: tuple[float, float] = (0.0, 0.0)
    exclude_radius: float = 0.0
    closed_right: bool = False


@dataclass(frozen=True)
class CircleAngles:
    """n angles in (-pi, pi) at cell midpoints: -pi + 2 pi (k + 1/2) / n."""

    n: int = 1000


@dataclass(frozen=True)
class SphereAngles:
    """Polar angle in (0, pi) times azimuth in (-pi, pi), both at midpoints."""

    n_theta: int = 100
    n_phi: int = 100


SamplerSpec = Union[IntervalGrid, SquareGrid, CircleAngles, SphereAngles]


def interval_points(a: float, b: float, n: int, closed_left=True, closed_right=True) -> np.ndarray:
    if n < 2 or not b > a:
        raise ValidationError("interval grid needs n >= 2 and b > a")
    extra = (not closed_left) + (not closed_right)
    grid = np.linspace(a, b, n + extra)
    if not closed_left:
        grid = grid[1:]
    if not closed_right:
        grid = grid[:-1]
    return grid


def sample(spec: SamplerSpec) -> PointCloud:
    if isinstance(spec, IntervalGrid):
        pts = interval_points(spec.a, spec.b, spec.n, spec.closed_left, spec.closed_right)
        return PointCloud(pts[:, None], ("x1",), (_describe(spec),))
    if isinstance(spec, SquareGrid):
        if spec.exclude_radius < 0:
            raise ValidationError("excluded-ball radius must be nonnegative")
        axis = interval_points(spec.a, spec.b, spec.n_per_axis, True, spec.closed_right)
        g1, g2 = np.meshgrid(axis, axis, indexing="ij")
        pts = np.column_stack([g1.ravel(), g2.ravel()])
        if spec.exclude_radius > 0:
            keep = np.hypot(*(pts - np.asarray(spec.exclude_center)).T) >= spec.exclude_radius
            pts = pts[keep]
        return PointCloud(pts, ("x1", "x2"), (_describe(spec),))
    if isinstance(spec, CircleAngles):
        if spec.n < 2:
            raise ValidationError("need n >= 2")
        th = -np.pi + 2 * np.pi * (np.arange(spec.n) + 0.5) / spec.n
        return PointCloud(th[:, None], ("theta",), (_describe(spec),))
    if isinstance(spec, SphereAngles):
        if spec.n_theta < 2 or spec.n_phi < 2:
            raise ValidationError("need at least 2 samples per angle")
        th = np.pi * (np.arange(spec.n_theta) + 0.5) / spec.n_theta
        ph = -np.pi + 2 * np.pi * (np.arange(spec.n_phi) + 0.5) / spec.n_phi
        g1, g2 = np.meshgrid(th, ph, indexing="ij")
        return PointCloud(np.column_stack([g1.ravel(), g2.ravel()]), ("theta", "phi"), (_describe(spec),))
    raise TypeError(f"unknown sampler spec {spec!r}")


def _describe(spec) -> str:
    return f"sample:{spec!r}"


def embed_angles(points) -> np.ndarray:
    """Angles to Cartesian coordinates: theta -> (cos, sin); (theta, phi) -> xyz."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[1] == 1:
        t = pts[:, 0]
        return np.column_stack([np.cos(t), np.sin(t)])
    if pts.shape[1] == 2:
        t, p = pts.T
        return np.column_stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)])
    raise ShapeError("can only embed circle (1 angle) or sphere (2 angles) parameters")


# --- CSV ingestion ----------------------------------------------------------


def load_csv(path, columns: Sequence[str] | None = None, target: str | None = None) -> PointCloud:
    """Read a headed, comma-separated numeric file.

    ``columns`` picks the feature columns (default: every column except
    ``target``). Row numbers in errors count data rows from 1; the file line
    is reported alongside.
    """
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise IngestionError(f"cannot open {path}: {exc.strerror or exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise IngestionError(f"{path}: file is empty") from None
        wanted = list(columns) if columns else [h for h in header if h != target]
        missing = [c for c in wanted + ([target] if target else []) if c not in header]
        if missing:
            raise IngestionError(f"{path}: missing column(s) {missing}; header has {header}")
        idx = [header.index(c) for c in wanted]
        t_idx = header.index(target) if target else None
        rows, labels = [], []
        for row_no, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            line = reader.line_num
            vals = []
            for c, i in zip(wanted, idx):
                vals.append(_parse_cell(row, i, c, row_no, line, path))
            rows.append(vals)
            if t_idx is not None:
                cell = row[t_idx].strip() if t_idx < len(row) else ""
                if not cell:
                    raise IngestionError(f"{path}: row {row_no} (line {line}), column {target!r}: missing value")
                labels.append(cell)
    if not rows:
        raise IngestionError(f"{path}: no data rows after the header")
    lab = None
    if labels:
        try:
            lab = np.array([float(v) for v in labels])
        except ValueError:
            lab = np.array(labels)
    return PointCloud(np.array(rows), tuple(wanted), (f"load_csv:{path.name}",), lab)


def _parse_cell(row, i, col, row_no, line, path) -> float:
    cell = row[i].strip() if i < len(row) else ""
    if not cell:
        raise IngestionError(f"{path}: row {row_no} (line {line}), column {col!r}: missing value")
    try:
        v = float(cell)
    except ValueError:
        raise IngestionError(f"{path}: row {row_no} (line {line}), column {col!r}: cannot parse {cell!r} as a number") from None
    if not math.isfinite(v):
        raise IngestionError(f"{path}: row {row_no} (line {line}), column {col!r}: non-finite value {cell!r}")
    return v


# --- preprocessing ----------------------------------------------------------


def _resolve(cloud: PointCloud, step: PreprocessStep) -> np.ndarray:
    if step.features is None:
        return np.arange(cloud.dim)
    out = []
    for f in step.features:
        if isinstance(f, str):
            if cloud.feature_names is None or f not in cloud.feature_names:
                raise ShapeError(f"step {step.describe()}: no feature named {f!r}")
            out.append(cloud.feature_names.index(f))
        else:
            if not 0 <= int(f) < cloud.dim:
                raise ShapeError(f"step {step.describe()}: feature index {f} out of range for dim {cloud.dim}")
            out.append(int(f))
    return np.array(out, dtype=int)


def apply_step(cloud: PointCloud, step: PreprocessStep) -> PointCloud:
    if step.kind not in KINDS:
        raise ValidationError(f"unknown preprocessing step {step.kind!r}")
    if len(step.params) != KINDS[step.kind]:
        raise ValidationError(f"{step.kind} takes {KINDS[step.kind]} parameter(s)")
    pts = np.array(cloud.points)
    prov = cloud.provenance + (step.describe(),)
    if step.kind == "simplex_e":
        if step.features is not None:
            raise ShapeError("simplex_e acts on whole rows; no feature selector allowed")
        out = np.array([simplex_map(p) for p in pts]) if len(pts) else np.empty((0, cloud.dim + 1))
        names = None if cloud.feature_names is None else cloud.feature_names + ("simplex_rest",)
        return replace(cloud, points=out, feature_names=names, provenance=prov)
    cols = _resolve(cloud, step)
    v = pts[:, cols]
    if step.kind == "sigmoid_scale_2pi":
        v = 2 * np.pi / (1 + np.exp(-v))
    elif step.kind == "divide_by":
        (c,) = step.params
        if c == 0:
            raise ValidationError("divide_by needs a nonzero constant")
        v = v / c
    elif step.kind == "affine":
        a, b = step.params
        v = a * v + b
    elif step.kind == "max_abs":
        scale = np.max(np.abs(v), axis=0) if len(v) else np.ones(len(cols))
        scale[scale == 0] = 1.0
        v = v / scale
    elif step.kind == "scale_to_range":
        lo, hi = step.params
        v = lo + (hi - lo) * v
    pts[:, cols] = v
    return replace(cloud, points=pts, provenance=prov)


def preprocess(cloud: PointCloud, steps: Sequence[PreprocessStep]) -> PointCloud:
    for step in steps:
        cloud = apply_step(cloud, step)
    return cloud


def parse_steps(text: str) -> list[PreprocessStep]:
    """Parse ``"max_abs;simplex_e;scale_to_range:0:6.283185"`` style pipelines.

    A step may end with ``@col1|col2`` to select features by name or index.
    """
    steps = []
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        body, _, sel = chunk.partition("@")
        kind, *args = body.split(":")
        kind = kind.strip().lower().replace("-", "_")
        if kind not in KINDS:
            raise ValidationError(f"unknown preprocessing step {kind!r}")
        try:
            params = tuple(_num(a) for a in args)
        except ValueError:
            raise ValidationError(f"bad numeric parameter in step {chunk!r}") from None
        feats = None
        if sel:
            feats = tuple(int(s) if s.strip().isdigit() else s.strip() for s in sel.split("|"))
        steps.append(PreprocessStep(kind, params, feats))
    return steps


def _num(s: str) -> float:
    s = s.strip().lower()
    mult = 1.0
    for token, val in (("2pi", 2 * np.pi), ("pi", np.pi)):
        if s.endswith(token):
            head = s[: -len(token)]
            mult = val
            s = head if head not in ("", "-") else head + "1"
            break
    return float(s) * mult


# --- presets ------------------------------------------------------------------

VF_COLUMNS = ("Freq.F", "Potencias", "N(%)", "F1(score)")


@dataclass(frozen=True)
class Preset:
    """Base steps for every encoder plus per-encoder-family extras.

    Families: ``angle``, ``iqp`` (all IQP variants), ``amplitude``, ``other``.
    The data entropy is taken from the base-preprocessed point.
    """

    name: str
    base: tuple[PreprocessStep, ...] = ()
    per_family: dict[str, tuple[PreprocessStep, ...]] = field(default_factory=dict)
    columns: tuple[str, ...] | None = None

    def steps_for(self, family: str) -> tuple[PreprocessStep, ...]:
        return self.per_family.get(family, ())


_MAXABS_FAMILIES = {
    "angle": (SimplexE(), ScaleToRange(-np.pi, np.pi)),
    "iqp": (SimplexE(), ScaleToRange(0.0, 2 * np.pi)),
}

PRESETS: dict[str, Preset] = {
    "none": Preset("none"),
    "vf": Preset(
        "vf",
        base=(
            SigmoidScale2Pi("Freq.F"),
            DivideBy(1_000_000, "Potencias"),
            SigmoidScale2Pi("Potencias"),
            DivideBy(100, "N(%)"),
            Affine(2 * np.pi, 0.0, "N(%)"),
            Affine(2 * np.pi, 0.0, "F1(score)"),
        ),
        columns=VF_COLUMNS,
    ),
    "ionosphere": Preset("ionosphere", base=(MaxAbs(),), per_family=_MAXABS_FAMILIES),
    "sirtuin6": Preset("sirtuin6", base=(MaxAbs(),), per_family=_MAXABS_FAMILIES),
    "maxabs": Preset("maxabs", base=(MaxAbs(),), per_family=_MAXABS_FAMILIES),
}


def get_preset(spec: str) -> Preset:
    """A registered preset name, or an explicit step pipeline applied to all encoders."""
    if spec in PRESETS:
        return PRESETS[spec]
    return Preset("custom", base=tuple(parse_steps(spec)))
