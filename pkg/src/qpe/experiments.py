"""Named, reproducible experiments: entropy sweeps, correlations, differences, Gram matrices."""

from __future__ import annotations

import json
import logging
import math
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .entropy import (
    EntropyValue,
    TranslationKind,
    classical_circle_entropy,
    data_entropy,
    pseudo_entropy,
    simplex_map,
)
from .errors import ShapeError, ValidationError
from .feature_maps import EncoderKind, EncoderSpec, fidelity_gram, pad_to_power_of_two
from .manifolds import (
    CircleAngles,
    IntervalGrid,
    PointCloud,
    SamplerSpec,
    SphereAngles,
    SquareGrid,
    embed_angles,
    get_preset,
    load_csv,
    preprocess,
    sample,
)
from .stats import DEFAULT_SEED, CorrelationReport, correlation_report

log = logging.getLogger(__name__)

EXCLUDE_BALL_DEFAULT = 0.05


@dataclass(frozen=True)
class CsvSource:
    path: Path
    columns: tuple[str, ...] | None = None
    target: str | None = None
    preset: str = "none"


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything that determines an experiment's output bytes.

    ``entropy`` selects the classical side: ``"simplex"`` is the Shannon
    entropy of E(v), ``"circle"`` the (cos^2, sin^2) distribution of a
    scalar angle. The two ``*_view`` fields say whether entropy and encoders
    see the raw parameters (``"point"``) or their Cartesian embedding
    (``"embed"``, for circle/sphere angles).
    """

    name: str
    encoders: tuple[EncoderSpec, ...]
    sampler: SamplerSpec | None = None
    data: CsvSource | None = None
    translations: tuple[TranslationKind, ...] = (TranslationKind.REAL, TranslationKind.MODULUS)
    seed: int = DEFAULT_SEED
    out_dir: Path | None = None
    entropy: str = "simplex"
    entropy_view: str = "point"
    encoder_view: str = "point"
    jobs: int = 1
    gnuplot: bool = False

    def __post_init__(self):
        if (self.sampler is None) == (self.data is None):
            raise ValidationError("experiment needs exactly one of a sampler or a CSV source")
        if not self.encoders:
            raise ValidationError("experiment needs at least one encoder")
        if self.entropy not in ("simplex", "circle"):
            raise ValidationError(f"unknown entropy kind {self.entropy!r}")
        for v in (self.entropy_view, self.encoder_view):
            if v not in ("point", "embed"):
                raise ValidationError(f"unknown view {v!r}")
        object.__setattr__(self, "translations", tuple(TranslationKind(t) for t in self.translations))


@dataclass(frozen=True)
class EntropyRecord:
    point: tuple[float, ...]
    shannon: float
    pseudo_real: float
    pseudo_imag: float
    pseudo_modulus: float
    branch_flag: bool
    encoder: str = ""

    @classmethod
    def build(cls, point, shannon: float, s: EntropyValue, encoder: str) -> EntropyRecord:
        return cls(tuple(float(v) for v in point), float(shannon), s.real, s.imag, s.modulus, s.branch_flag, encoder)

    def translated(self, kind: TranslationKind) -> float:
        return self.pseudo_real if TranslationKind(kind) is TranslationKind.REAL else self.pseudo_modulus


def encoder_family(spec: EncoderSpec) -> str:
    k = spec.kind
    if k is EncoderKind.ANGLE:
        return "angle"
    if k in (EncoderKind.IQP, EncoderKind.IQP_SO, EncoderKind.IQP_FL):
        return "iqp"
    if k is EncoderKind.AMPLITUDE:
        return "amplitude"
    return "other"


@dataclass
class PreparedInputs:
    """Raw points, the classical entropy series, and per-encoder input rows."""

    cloud: PointCloud
    shannon: np.ndarray
    encoder_inputs: dict[str, np.ndarray] = field(default_factory=dict)


def _view(points: np.ndarray, view: str) -> np.ndarray:
    return embed_angles(points) if view == "embed" else points


def _amplitude_rows(rows: np.ndarray) -> np.ndarray:
    return np.array([pad_to_power_of_two(simplex_map(r)) for r in rows])


def prepare(spec: ExperimentSpec) -> PreparedInputs:
    if spec.sampler is not None:
        raw = sample(spec.sampler)
        base = raw
        family_steps = lambda fam: ()  # noqa: E731
    else:
        src = spec.data
        preset = get_preset(src.preset)
        columns = src.columns or preset.columns
        raw = load_csv(src.path, columns=columns, target=src.target)
        base = preprocess(raw, preset.base)
        family_steps = preset.steps_for

    pts = np.asarray(base.points)
    if spec.entropy == "circle":
        if pts.shape[1] != 1:
            raise ShapeError("circle entropy needs scalar angles")
        shannon = np.array([classical_circle_entropy(t).real for t in pts[:, 0]])
    else:
        shannon = np.array([data_entropy(v).real for v in _view(pts, spec.entropy_view)])

    out = PreparedInputs(raw, shannon)
    for enc in spec.encoders:
        if enc.name in out.encoder_inputs:
            continue
        fam = encoder_family(enc)
        cloud = PointCloud(_view(pts, spec.encoder_view))
        cloud = preprocess(cloud, family_steps(fam))
        rows = np.asarray(cloud.points)
        if fam == "amplitude" and enc.options.get("amplitude_input", "simplex") == "simplex":
            rows = _amplitude_rows(rows)
        want = enc.expected_input_dim()
        if want is not None and rows.shape[1] != want:
            raise ShapeError(f"encoder {enc.name} expects {want} input value(s) but the data provide {rows.shape[1]}")
        out.encoder_inputs[enc.name] = rows
    return out


def _pseudo_row(args) -> tuple[float, float, bool]:
    enc, x = args
    s = pseudo_entropy(enc.encode(x))
    return s.real, s.imag, s.branch_flag


def _pseudo_series(enc: EncoderSpec, rows: np.ndarray, jobs: int) -> list[EntropyValue]:
    work = [(enc, r) for r in rows]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            res = list(pool.map(_pseudo_row, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        res = [_pseudo_row(w) for w in work]
    return [EntropyValue(r, i, f) for r, i, f in res]


def compute_records(spec: ExperimentSpec, prepared: PreparedInputs | None = None) -> list[EntropyRecord]:
    """One record per sample point per encoder, encoder-major, in sampler order."""
    prepared = prepared or prepare(spec)
    records = []
    for enc in spec.encoders:
        values = _pseudo_series(enc, prepared.encoder_inputs[enc.name], spec.jobs)
        for p, sh, s in zip(prepared.cloud.points, prepared.shannon, values):
            records.append(EntropyRecord.build(p, sh, s, enc.name))
    return records


def _by_encoder(records: Sequence[EntropyRecord]) -> dict[str, list[EntropyRecord]]:
    groups: dict[str, list[EntropyRecord]] = {}
    for r in records:
        groups.setdefault(r.encoder, []).append(r)
    return groups


# --- output -------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return repr(float(v) + 0.0)  # no "-0.0"


def sweep_header(dim: int) -> list[str]:
    return [f"x{i + 1}" for i in range(dim)] + ["shannon", "pseudo_real", "pseudo_imag", "pseudo_modulus", "branch_flag"]


def _write_rows(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _slug(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in name)


def write_sweep_csv(path: Path, records: Sequence[EntropyRecord]) -> None:
    dim = len(records[0].point) if records else 0
    rows = ((*r.point, r.shannon, r.pseudo_real, r.pseudo_imag, r.pseudo_modulus, r.branch_flag) for r in records)
    _write_rows(path, sweep_header(dim), rows)


def write_gnuplot(csv_path: Path, columns: list[str], ycols: list[str]) -> Path:
    """A minimal gnuplot script plotting the given columns against x1 (and x2 if present)."""
    gp = csv_path.with_suffix(".gp")
    surface = "x2" in columns
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set terminal pngcairo size 900,600",
        f"set output '{csv_path.with_suffix('.png').name}'",
    ]
    plots = []
    for y in ycols:
        c = columns.index(y) + 1
        if surface:
            plots.append(f"'{csv_path.name}' using 1:2:{c} with points pt 7 ps 0.3")
        else:
            plots.append(f"'{csv_path.name}' using 1:{c} with lines")
    lines.append(("splot " if surface else "plot ") + ", \\\n     ".join(plots))
    gp.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return gp


def write_metadata(spec: ExperimentSpec, kind: str, outputs: Sequence[Path]) -> Path:
    """Timestamps live only here so the data files stay byte-reproducible."""
    path = spec.out_dir / f"{_slug(spec.name)}.{kind}.meta.json"
    meta = {
        "experiment": spec.name,
        "operation": kind,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "seed": spec.seed,
        "encoders": [e.name for e in spec.encoders],
        "translations": [t.value for t in spec.translations],
        "sampler": repr(spec.sampler) if spec.sampler else None,
        "data": str(spec.data.path) if spec.data else None,
        "preset": spec.data.preset if spec.data else None,
        "outputs": [p.name for p in outputs],
    }
    path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return path


# --- operations ---------------------------------------------------------------


def run_entropy_sweep(spec: ExperimentSpec) -> list[EntropyRecord]:
    records = compute_records(spec)
    if spec.out_dir is not None:
        outputs = []
        for enc, recs in _by_encoder(records).items():
            path = spec.out_dir / f"{_slug(spec.name)}__{_slug(enc)}.csv"
            write_sweep_csv(path, recs)
            outputs.append(path)
            if spec.gnuplot:
                cols = sweep_header(len(recs[0].point))
                outputs.append(write_gnuplot(path, cols, ["shannon", "pseudo_real", "pseudo_imag"]))
        write_metadata(spec, "sweep", outputs)
    return records


def correlations_from_records(records: Sequence[EntropyRecord], spec: ExperimentSpec) -> list[CorrelationReport]:
    reports = []
    for enc, recs in _by_encoder(records).items():
        xs = np.array([r.shannon for r in recs])
        for t in spec.translations:
            ys = np.array([r.translated(t) for r in recs])
            reports.append(correlation_report(xs, ys, spec.seed, encoder=enc, translation=t))
    return reports


def run_correlation(spec: ExperimentSpec, records: Sequence[EntropyRecord] | None = None) -> list[CorrelationReport]:
    records = compute_records(spec) if records is None else records
    if len(records) < 2 * len(spec.encoders):
        raise ShapeError("correlation needs at least two samples")
    reports = correlations_from_records(records, spec)
    if spec.out_dir is not None:
        path = spec.out_dir / f"{_slug(spec.name)}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps([r.to_json() for r in reports], indent=2) + "\n", encoding="utf-8")
        write_metadata(spec, "correlate", [path])
    return reports


@dataclass(frozen=True)
class DifferenceRow:
    point: tuple[float, ...]
    shannon: float
    diff_real: float
    diff_modulus: float
    encoder: str


def run_difference(spec: ExperimentSpec) -> list[DifferenceRow]:
    """Per point: Shannon entropy minus translated pseudo-entropy, both translations."""
    if len(spec.encoders) != 1:
        raise ValidationError("difference experiments take exactly one encoder")
    records = compute_records(spec)
    rows = [
        DifferenceRow(r.point, r.shannon, r.shannon - r.pseudo_real, r.shannon - r.pseudo_modulus, r.encoder)
        for r in records
    ]
    if spec.out_dir is not None:
        enc = spec.encoders[0].name
        path = spec.out_dir / f"{_slug(spec.name)}__{_slug(enc)}__diff.csv"
        dim = len(rows[0].point)
        header = [f"x{i + 1}" for i in range(dim)] + ["shannon", "diff_real", "diff_modulus"]
        _write_rows(path, header, ((*r.point, r.shannon, r.diff_real, r.diff_modulus) for r in rows))
        outputs = [path]
        if spec.gnuplot:
            outputs.append(write_gnuplot(path, header, ["diff_real", "diff_modulus"]))
        write_metadata(spec, "diff", outputs)
    return rows


def run_gram(spec: ExperimentSpec) -> dict[str, np.ndarray]:
    prepared = prepare(spec)
    grams = {}
    outputs = []
    for enc in spec.encoders:
        g = fidelity_gram(prepared.encoder_inputs[enc.name], enc)
        grams[enc.name] = g
        if spec.out_dir is not None:
            path = spec.out_dir / f"{_slug(spec.name)}__{_slug(enc.name)}__gram.csv"
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", encoding="utf-8") as fh:
                for row in g:
                    fh.write(",".join(_fmt(v) for v in row) + "\n")
            outputs.append(path)
    if spec.out_dir is not None:
        write_metadata(spec, "gram", outputs)
    return grams


# --- registry -----------------------------------------------------------------


@dataclass(frozen=True)
class Registered:
    build: Callable[..., ExperimentSpec]
    operations: tuple[str, ...]
    needs_data: bool = False
    description: str = ""


def _enc(*kinds: EncoderKind, su_normalize: bool = False) -> tuple[EncoderSpec, ...]:
    opts = {"su_normalize": True} if su_normalize else {}
    return tuple(EncoderSpec(k, options=dict(opts)) for k in kinds)


def _experiment(name, encoders, *, grid=None, default_grid, make_sampler, su_normalize=False, **kw):
    n = grid or default_grid
    return ExperimentSpec(name=name, encoders=_enc(*encoders, su_normalize=su_normalize), sampler=make_sampler(n), **kw)


def _registry() -> dict[str, Registered]:
    K = EncoderKind
    pi = math.pi

    def fig3(grid=None, exclude_ball=None, su_normalize=False, **kw):
        return _experiment(
            "fig3-circle", (K.CIRCLE_AMPLITUDE, K.CIRCLE_ANGLE), grid=grid, default_grid=1000,
            make_sampler=lambda n: IntervalGrid(0.0, pi / 2, n), entropy="circle", su_normalize=su_normalize, **kw,
        )

    def fig4(grid=None, exclude_ball=None, su_normalize=False, **kw):
        r = 0.0 if exclude_ball is None else exclude_ball
        return _experiment(
            "fig4-square", (K.AMPLITUDE, K.ANGLE), grid=grid, default_grid=100,
            make_sampler=lambda n: SquareGrid(0.0, pi, n, exclude_radius=r), su_normalize=su_normalize, **kw,
        )

    def fig5(grid=None, exclude_ball=None, su_normalize=False, name="fig5-circle-phase", **kw):
        return _experiment(
            name, (K.PHASE_PRODUCT,), grid=grid, default_grid=1000,
            make_sampler=lambda n: CircleAngles(n), entropy_view="embed", su_normalize=su_normalize, **kw,
        )

    def fig6(grid=None, exclude_ball=None, su_normalize=False, **kw):
        r = EXCLUDE_BALL_DEFAULT if exclude_ball is None else exclude_ball
        return _experiment(
            "fig6-square-iqp", (K.IQP,), grid=grid, default_grid=100,
            make_sampler=lambda n: SquareGrid(0.0, pi, n, exclude_radius=r), su_normalize=su_normalize, **kw,
        )

    def fig7(grid=None, exclude_ball=None, su_normalize=False, name="fig7-sphere", **kw):
        return _experiment(
            name, (K.PHASE_PRODUCT,), grid=grid, default_grid=100,
            make_sampler=lambda n: SphereAngles(n, n), entropy_view="embed", su_normalize=su_normalize, **kw,
        )

    def table1(grid=None, exclude_ball=None, su_normalize=False, **kw):
        return _experiment(
            "table1-expressivity", (K.EXPRESSIVITY_SHALLOW, K.EXPRESSIVITY_DEEP), grid=grid, default_grid=1000,
            make_sampler=lambda n: IntervalGrid(0.0, 2 * pi, n, closed_left=False, closed_right=False),
            su_normalize=su_normalize, **kw,
        )

    def table_sym(grid=None, exclude_ball=None, su_normalize=False, **kw):
        return _experiment(
            "table-symmetric", (K.SYMMETRIC_RZ, K.SYMMETRIC_RY), grid=grid, default_grid=1000,
            make_sampler=lambda n: CircleAngles(n), encoder_view="embed", su_normalize=su_normalize, **kw,
        )

    dataset_encoders = (K.AMPLITUDE, K.ANGLE, K.IQP, K.IQP_FL, K.IQP_SO)

    def dataset(name, default_preset):
        def build(data=None, columns=None, target=None, preset=None, su_normalize=False, grid=None, exclude_ball=None, **kw):
            if data is None:
                raise ValidationError(f"experiment {name} needs --data <csv>")
            src = CsvSource(Path(data), tuple(columns) if columns else None, target, preset or default_preset)
            return ExperimentSpec(name=name, encoders=_enc(*dataset_encoders, su_normalize=su_normalize), data=src, **kw)

        return build

    return {
        "fig3-circle": Registered(fig3, ("sweep", "correlate"), description="unit-circle classical/amplitude/angle curves"),
        "fig4-square": Registered(fig4, ("sweep",), description="[0,pi)^2 amplitude and angle encodings"),
        "fig5-circle-phase": Registered(fig5, ("sweep",), description="S^1 phase-gate pseudo-entropy"),
        "fig6-square-iqp": Registered(fig6, ("sweep",), description="[0,pi)^2 IQP with excluded ball"),
        "fig7-sphere": Registered(fig7, ("sweep",), description="S^2 phase-gate pseudo-entropy"),
        "diff-circle": Registered(lambda **kw: fig5(name="diff-circle", **kw), ("diff",), description="S^1 entropy differences"),
        "diff-sphere": Registered(lambda **kw: fig7(name="diff-sphere", **kw), ("diff",), description="S^2 entropy differences"),
        "table1-expressivity": Registered(table1, ("correlate",), description="expressivity circuits"),
        "table-symmetric": Registered(table_sym, ("correlate",), description="Klein four-group symmetric encodings"),
        "table2-vf": Registered(dataset("table2-vf", "vf"), ("correlate",), True, "ventricular fibrillation CSV"),
        "table3-datasets": Registered(dataset("table3-datasets", "maxabs"), ("correlate",), True, "Ionosphere / Sirtuin6 CSV"),
    }


REGISTRY = _registry()


def build_experiment(name: str, **overrides) -> ExperimentSpec:
    if name not in REGISTRY:
        raise ValidationError(f"unknown experiment {name!r}; choose from {sorted(REGISTRY)}")
    return REGISTRY[name].build(**overrides)


def run_experiment(name: str, **overrides) -> dict:
    """Run every operation registered for ``name``; returns their results by operation."""
    reg = REGISTRY.get(name)
    if reg is None:
        raise ValidationError(f"unknown experiment {name!r}; choose from {sorted(REGISTRY)}")
    spec = reg.build(**overrides)
    results: dict = {}
    if "sweep" in reg.operations:
        results["sweep"] = run_entropy_sweep(spec)
    if "correlate" in reg.operations:
        results["correlate"] = run_correlation(spec, results.get("sweep"))
    if "diff" in reg.operations:
        results["diff"] = run_difference(spec)
    return results
