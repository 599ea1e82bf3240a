"""
Model selection by topological complexity.

For a novel dataset, pre-trained models are ranked by how far their
complexity is from the dataset's; the harness compares the accuracy of the
closest models with that of the farthest ones across many datasets.
"""

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Union

import numpy as np
from scipy import stats

from .complexity import MEASURES, ComplexityTable
from .errors import MissingAccuracyError, ParseError, ValidationError
from .utils import log_debug, log_warning

SUBGROUPS = ("all", "lower", "higher")
CI_METHODS = ("normal", "t")
Z_95 = 1.96


@dataclass(frozen=True)
class CatalogEntry:
    model_id: str
    h0_total: Optional[int]
    h1_total: Optional[int]

    def score(self, measure: str) -> Optional[int]:
        if measure == "h0":
            return self.h0_total
        if measure == "h1":
            return self.h1_total
        if measure == "combined":
            if self.h0_total is None or self.h1_total is None:
                return None
            return self.h0_total + self.h1_total
        raise ValidationError("measure", f"expected one of {', '.join(MEASURES)}, got {measure!r}")


@dataclass(frozen=True)
class ModelCatalog:
    """Pre-trained models with their complexity totals."""

    entries: tuple[CatalogEntry, ...]

    def __post_init__(self):
        seen = set()
        for entry in self.entries:
            if entry.model_id in seen:
                raise ValidationError("model_id", f"duplicate model {entry.model_id}")
            seen.add(entry.model_id)
            for name in ("h0_total", "h1_total"):
                value = getattr(entry, name)
                if value is not None and value < 0:
                    raise ValidationError(name, f"{entry.model_id}: scores must be nonnegative")

    @classmethod
    def from_table(cls, table: ComplexityTable) -> "ModelCatalog":
        return cls(tuple(CatalogEntry(row.model_id, row.h0_total, row.h1_total) for row in table.rows))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ModelCatalog":
        """Read a catalog CSV with columns model_id, h0_total, h1_total."""
        entries = []
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            missing = {"model_id", "h0_total", "h1_total"} - set(reader.fieldnames or [])
            if missing:
                raise ParseError(1, f"missing columns: {', '.join(sorted(missing))}")
            for line, record in enumerate(reader, start=2):
                entries.append(CatalogEntry(
                    model_id=record["model_id"].strip(),
                    h0_total=_optional_int(record["h0_total"], line),
                    h1_total=_optional_int(record["h1_total"], line),
                ))
        return cls(tuple(entries))

    def __len__(self) -> int:
        return len(self.entries)

    def scores(self, measure: str) -> dict[str, int]:
        """Model id -> score, skipping models with a blank cell for `measure`."""
        if measure not in MEASURES:
            raise ValidationError("measure", f"expected one of {', '.join(MEASURES)}, got {measure!r}")
        result = {}
        for entry in self.entries:
            value = entry.score(measure)
            if value is not None:
                result[entry.model_id] = value
        return result


def _optional_int(text: str, line: int) -> Optional[int]:
    text = (text or "").strip()
    if not text:
        return None
    try:
        return int(text)
    except ValueError:
        raise ParseError(line, f"expected an integer score, got {text!r}") from None


@dataclass(frozen=True)
class AccuracyMatrix:
    """acc[(model_id, dataset_id)] in [0, 1]."""

    values: Mapping[tuple[str, str], float]

    def __post_init__(self):
        for (model, dataset), value in self.values.items():
            if not 0.0 <= value <= 1.0:
                raise ValidationError("accuracy", f"({model}, {dataset}) = {value} is outside [0, 1]")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "AccuracyMatrix":
        """Read a CSV with columns model_id, dataset_id, accuracy."""
        values: dict[tuple[str, str], float] = {}
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            missing = {"model_id", "dataset_id", "accuracy"} - set(reader.fieldnames or [])
            if missing:
                raise ParseError(1, f"missing columns: {', '.join(sorted(missing))}")
            for line, record in enumerate(reader, start=2):
                key = (record["model_id"].strip(), record["dataset_id"].strip())
                if key in values:
                    raise ParseError(line, f"duplicate entry for {key}")
                try:
                    values[key] = float(record["accuracy"])
                except (TypeError, ValueError):
                    raise ParseError(line, f"accuracy is not a number: {record['accuracy']!r}") from None
        return cls(values)

    def get(self, model_id: str, dataset_id: str) -> float:
        return self.values[(model_id, dataset_id)]

    def __contains__(self, key: tuple[str, str]) -> bool:
        return key in self.values


@dataclass(frozen=True)
class Ranking:
    closest: tuple[str, ...]
    farthest: tuple[str, ...]
    distances: Mapping[str, float]
    shortfall: bool

    @property
    def overlapping(self) -> bool:
        return bool(set(self.closest) & set(self.farthest))


def rank_models(
    scores: Union[Mapping[str, float], ModelCatalog],
    dataset_score: float,
    m: int = 5,
    subgroup: str = "all",
    exclude: Optional[str] = None,
    measure: str = "combined",
) -> Ranking:
    """
    The m models closest to and farthest from a dataset's complexity.

    Args:
        scores: Model id -> complexity, or a ModelCatalog read under `measure`
        dataset_score: The dataset's complexity under the same measure
        m: List length
        subgroup: "all", "lower" (score < dataset) or "higher" (score >= dataset)
        exclude: Model id left out of both lists
        measure: Catalog column used when `scores` is a ModelCatalog

    Returns:
        Ranking; ties in distance go to the smaller model id
    """
    if m < 1:
        raise ValidationError("m", f"must be >= 1, got {m}")
    if subgroup not in SUBGROUPS:
        raise ValidationError("subgroup", f"expected one of {', '.join(SUBGROUPS)}, got {subgroup!r}")
    if isinstance(scores, ModelCatalog):
        scores = scores.scores(measure)

    candidates = {
        model: score for model, score in scores.items()
        if model != exclude
        and (subgroup == "all"
             or (subgroup == "lower" and score < dataset_score)
             or (subgroup == "higher" and score >= dataset_score))
    }
    if not candidates:
        raise ValidationError("catalog", f"no models left after filtering (subgroup {subgroup})")

    distances = {model: abs(score - dataset_score) for model, score in candidates.items()}
    closest = sorted(distances, key=lambda model: (distances[model], model))[:m]
    farthest = sorted(distances, key=lambda model: (-distances[model], model))[:m]
    return Ranking(tuple(closest), tuple(farthest), distances, shortfall=len(candidates) < m)


@dataclass(frozen=True)
class DatasetSelection:
    dataset_id: str
    score: float
    closest: tuple[str, ...]
    farthest: tuple[str, ...]
    gap: float
    shortfall: bool

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "score": self.score,
            "closest": list(self.closest),
            "farthest": list(self.farthest),
            "gap": self.gap,
            "shortfall": self.shortfall,
        }


@dataclass(frozen=True)
class SelectionReport:
    """Closest-minus-farthest accuracy gaps for one measure and subgroup."""

    measure: str
    subgroup: str
    m: int
    datasets: tuple[DatasetSelection, ...]
    mean_gap: float
    ci: tuple[float, float]
    ci_method: str
    skipped: tuple[str, ...] = field(default=())

    @property
    def n_datasets(self) -> int:
        return len(self.datasets)

    @property
    def ci_excludes_zero(self) -> bool:
        lower, upper = self.ci
        return lower > 0 or upper < 0

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "subgroup": self.subgroup,
            "m": self.m,
            "n_datasets": self.n_datasets,
            "mean_gap": self.mean_gap,
            "ci": list(self.ci),
            "ci_method": self.ci_method,
            "ci_excludes_zero": self.ci_excludes_zero,
            "skipped": list(self.skipped),
            "datasets": [d.to_dict() for d in self.datasets],
        }


def confidence_interval(gaps: np.ndarray, method: str = "normal") -> tuple[float, float]:
    """95% interval for the mean: normal approximation or Student t."""
    if method not in CI_METHODS:
        raise ValidationError("ci", f"expected one of {', '.join(CI_METHODS)}, got {method!r}")
    mean = float(np.mean(gaps))
    if len(gaps) < 2:
        return (mean, mean)
    stderr = float(np.std(gaps, ddof=1)) / math.sqrt(len(gaps))
    factor = Z_95 if method == "normal" else float(stats.t.ppf(0.975, len(gaps) - 1))
    return (mean - factor * stderr, mean + factor * stderr)


def accuracy_gap(
    catalog: ModelCatalog,
    accuracy: AccuracyMatrix,
    dataset_scores: Mapping[str, float],
    measure: str = "combined",
    m: int = 5,
    subgroup: str = "all",
    exclude_self: bool = False,
    ci_method: str = "normal",
) -> SelectionReport:
    """
    Mean accuracy gap between the closest and farthest models over datasets.

    Args:
        catalog: Pre-trained models
        accuracy: Cross-evaluation accuracies (model, dataset)
        dataset_scores: Dataset id -> complexity under `measure`
        measure: "combined", "h0" or "h1"
        m: Models per list
        subgroup: Candidate filter, see rank_models
        exclude_self: Leave out the model whose id equals the dataset id
        ci_method: "normal" or "t"

    Raises:
        MissingAccuracyError: listing every (model, dataset) pair needed but absent
    """
    scores = catalog.scores(measure)
    rankings = {}
    skipped = []
    for dataset_id in sorted(dataset_scores):
        try:
            rankings[dataset_id] = rank_models(scores, dataset_scores[dataset_id], m, subgroup,
                                               exclude=dataset_id if exclude_self else None)
        except ValidationError as exc:
            if exc.field != "catalog":
                raise
            skipped.append(dataset_id)

    missing = sorted({
        (model, dataset_id)
        for dataset_id, ranking in rankings.items()
        for model in ranking.closest + ranking.farthest
        if (model, dataset_id) not in accuracy
    })
    if missing:
        raise MissingAccuracyError(missing)

    selections = []
    for dataset_id, ranking in rankings.items():
        near = np.mean([accuracy.get(model, dataset_id) for model in ranking.closest])
        far = np.mean([accuracy.get(model, dataset_id) for model in ranking.farthest])
        selections.append(DatasetSelection(dataset_id, float(dataset_scores[dataset_id]), ranking.closest,
                                           ranking.farthest, float(near - far), ranking.shortfall))
    if skipped:
        log_warning(f"{len(skipped)} dataset(s) had no {subgroup}-complexity models: {', '.join(skipped)}")
    if not selections:
        raise ValidationError("datasets", f"no dataset could be ranked (measure {measure}, subgroup {subgroup})")

    gaps = np.array([s.gap for s in selections])
    report = SelectionReport(
        measure=measure,
        subgroup=subgroup,
        m=m,
        datasets=tuple(selections),
        mean_gap=float(np.mean(gaps)),
        ci=confidence_interval(gaps, ci_method),
        ci_method=ci_method,
        skipped=tuple(skipped),
    )
    log_debug(f"{measure}/{subgroup}: mean gap {report.mean_gap:+.4f} over {report.n_datasets} datasets")
    return report


def selection_report(
    catalog: ModelCatalog,
    accuracy: AccuracyMatrix,
    dataset_table: Union[ComplexityTable, ModelCatalog],
    m: int = 5,
    exclude_self: bool = False,
    measures: tuple[str, ...] = MEASURES,
    subgroups: tuple[str, ...] = SUBGROUPS,
) -> dict:
    """
    Every measure x subgroup bar, with normal and t intervals.

    Measures are computed independently and never mixed. Datasets with a
    blank cell for a measure are left out of that measure only.
    """
    datasets = dataset_table if isinstance(dataset_table, ModelCatalog) else ModelCatalog.from_table(dataset_table)
    bars = []
    for measure in measures:
        dataset_scores = datasets.scores(measure)
        for subgroup in subgroups:
            report = accuracy_gap(catalog, accuracy, dataset_scores, measure, m, subgroup, exclude_self, "normal")
            t_interval = confidence_interval(np.array([d.gap for d in report.datasets]), "t")
            bar = report.to_dict()
            bar["ci_t"] = list(t_interval)
            bars.append(bar)
    return {"m": m, "exclude_self": exclude_self, "bars": bars}
