"""Column-named record tables, continuous or category-coded."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class DataFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    """``N x |V|`` table of records.

    For discrete data ``values`` holds integer category codes and
    ``cardinalities`` the number of categories per column.
    """

    names: tuple[str, ...]
    values: np.ndarray
    discrete: bool = False
    cardinalities: tuple[int, ...] | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 2:
            raise DataFormatError("records must form a 2-d table")
        if values.shape[0] < 1:
            raise DataFormatError("dataset needs at least one record")
        if values.shape[1] != len(self.names):
            raise DataFormatError(f"{values.shape[1]} columns but {len(self.names)} names")
        object.__setattr__(self, "names", tuple(self.names))
        if self.discrete:
            values = values.astype(np.int64)
            cards = self.cardinalities
            if cards is None:
                cards = tuple(int(c) + 1 for c in values.max(axis=0))
            cards = tuple(int(c) for c in cards)
            if len(cards) != values.shape[1]:
                raise DataFormatError("one cardinality per column required")
            if (values < 0).any() or (values >= np.asarray(cards)).any():
                raise DataFormatError("category code outside [0, cardinality)")
            object.__setattr__(self, "cardinalities", cards)
        else:
            values = values.astype(np.float64)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_records(self) -> int:
        return self.values.shape[0]

    @property
    def n_vars(self) -> int:
        return self.values.shape[1]

    def covariance(self) -> np.ndarray:
        """Maximum-likelihood covariance (divides by N), cached."""
        if "cov" not in self._cache:
            centered = self.values - self.values.mean(axis=0)
            self._cache["cov"] = centered.T @ centered / self.n_records
        return self._cache["cov"]

    def correlation(self) -> np.ndarray:
        if "corr" not in self._cache:
            cov = self.covariance()
            sd = np.sqrt(np.diag(cov))
            with np.errstate(divide="ignore", invalid="ignore"):
                corr = cov / np.outer(sd, sd)
            self._cache["corr"] = corr
        return self._cache["corr"]


def read_csv(path: str | Path, discrete: bool = False) -> Dataset:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if len(rows) < 2:
        raise DataFormatError(f"{path}: need a header row and at least one record")
    names = [s.strip() for s in rows[0]]
    try:
        values = np.array([[float(v) for v in r] for r in rows[1:]])
    except ValueError as exc:
        raise DataFormatError(f"{path}: non-numeric entry ({exc})") from exc
    if values.shape[1] != len(names):
        raise DataFormatError(f"{path}: ragged rows")
    if discrete:
        if not np.all(values == np.round(values)):
            raise DataFormatError(f"{path}: discrete data must hold integer codes")
    return Dataset(tuple(names), values, discrete=discrete)


def dataset_to_csv(data: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(data.names)
    fmt = str if data.discrete else repr
    for row in data.values.tolist():
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def default_names(n: int) -> list[str]:
    return [f"X{i + 1}" for i in range(n)]

