"""Mixed discrete/continuous dataset container"""

import logging
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from app.config import settings
from app.core.exceptions import SchemaError
from app.models.enums import NodeKind
from app.models.schemas import NodeId

logger = logging.getLogger(__name__)


class MixedTable:
    """
    Columnar dataset of discrete and continuous observations.

    Discrete columns are pandas categoricals whose categories form the
    level dictionary (sorted, stable under row selection); continuous
    columns are float64 with NaN marking missing cells. Instances are
    treated as immutable: every transformation returns a new table.
    """

    def __init__(
        self,
        frame: pd.DataFrame,
        schema: Mapping[str, NodeKind],
        percentage: Iterable[str] = (),
    ):
        missing = [c for c in schema if c not in frame.columns]
        if missing:
            raise SchemaError(f"Columns declared in schema but absent from data: {missing}", missing)

        columns = {}
        for name, kind in schema.items():
            series = frame[name]
            if kind == NodeKind.DISCRETE:
                if not isinstance(series.dtype, pd.CategoricalDtype):
                    series = pd.Series(pd.Categorical(series), name=name)
                columns[name] = series.reset_index(drop=True)
            else:
                numeric = pd.to_numeric(series, errors="coerce")
                bad = numeric.isna() & series.notna()
                if bad.any():
                    raise SchemaError(
                        f"Continuous column '{name}' has non-numeric values at rows "
                        f"{list(np.flatnonzero(bad.to_numpy())[:5])}",
                        [name],
                    )
                columns[name] = numeric.astype("float64").reset_index(drop=True)

        self._frame = pd.DataFrame(columns)
        self._schema: Dict[str, NodeKind] = {k: NodeKind(v) for k, v in schema.items()}
        self._percentage = frozenset(percentage)
        unknown = self._percentage - set(self._schema)
        if unknown:
            raise SchemaError(f"Percentage columns not in schema: {sorted(unknown)}", sorted(unknown))

    # === Schema
    @property
    def columns(self) -> List[str]:
        return list(self._schema)

    @property
    def schema(self) -> Dict[str, NodeKind]:
        return dict(self._schema)

    @property
    def nodes(self) -> List[NodeId]:
        return [NodeId(name=n, kind=k) for n, k in self._schema.items()]

    @property
    def percentage_columns(self) -> frozenset:
        return self._percentage

    @property
    def continuous_columns(self) -> List[str]:
        return [c for c, k in self._schema.items() if k == NodeKind.CONTINUOUS]

    @property
    def discrete_columns(self) -> List[str]:
        return [c for c, k in self._schema.items() if k == NodeKind.DISCRETE]

    def kind(self, name: str) -> NodeKind:
        self._check(name)
        return self._schema[name]

    # === Values
    @property
    def n_rows(self) -> int:
        return len(self._frame)

    @property
    def frame(self) -> pd.DataFrame:
        return self._frame.copy()

    def levels(self, name: str) -> List:
        self._check(name, NodeKind.DISCRETE)
        return list(self._frame[name].cat.categories)

    def codes(self, name: str) -> np.ndarray:
        """Category codes, -1 where missing"""
        self._check(name, NodeKind.DISCRETE)
        return self._frame[name].cat.codes.to_numpy(dtype=np.int64)

    def values(self, name: str) -> np.ndarray:
        """Continuous values, NaN where missing"""
        self._check(name, NodeKind.CONTINUOUS)
        return self._frame[name].to_numpy(dtype=np.float64)

    @property
    def missing_mask(self) -> pd.DataFrame:
        return self._frame.isna()

    @property
    def n_missing(self) -> int:
        return int(self.missing_mask.to_numpy().sum())

    @property
    def is_complete(self) -> bool:
        return self.n_missing == 0

    # === Derivations
    def take(self, indices: Sequence[int]) -> "MixedTable":
        """Row selection; level dictionaries are preserved"""
        subset = self._frame.iloc[np.asarray(indices, dtype=np.int64)].reset_index(drop=True)
        return MixedTable(subset, self._schema, self._percentage)

    def with_values(self, name: str, values: np.ndarray) -> "MixedTable":
        """Replace one continuous column"""
        self._check(name, NodeKind.CONTINUOUS)
        frame = self._frame.copy()
        frame[name] = np.asarray(values, dtype=np.float64)
        return MixedTable(frame, self._schema, self._percentage)

    def with_codes(self, name: str, codes: np.ndarray) -> "MixedTable":
        """Replace one discrete column by category codes (-1 = missing)"""
        categories = self._frame[name].cat.categories
        frame = self._frame.copy()
        frame[name] = pd.Categorical.from_codes(np.asarray(codes, dtype=np.int64), categories=categories)
        return MixedTable(frame, self._schema, self._percentage)

    def recode(self, column: str, mapping: Mapping[str, str]) -> "MixedTable":
        """
        Regroup the levels of a discrete column (e.g. regions into macro-areas).

        Levels absent from the mapping are kept as they are.
        """
        self._check(column, NodeKind.DISCRETE)
        raw = self._frame[column].astype(object)
        recoded = raw.map(lambda v: v if pd.isna(v) else str(mapping.get(str(v), v)))
        frame = self._frame.copy()
        frame[column] = pd.Categorical(recoded)
        logger.info(f"Recoded '{column}': {len(self.levels(column))} -> {frame[column].cat.categories.size} levels")
        return MixedTable(frame, self._schema, self._percentage)

    def drop(self, columns: Iterable[str]) -> "MixedTable":
        columns = list(columns)
        for c in columns:
            self._check(c)
        schema = {k: v for k, v in self._schema.items() if k not in columns}
        return MixedTable(self._frame.drop(columns=columns), schema, self._percentage - set(columns))

    def equals(self, other: "MixedTable") -> bool:
        return self._schema == other._schema and self._frame.equals(other._frame)

    def to_csv(self, path: Path, sentinel: Optional[str] = None) -> None:
        sentinel = settings.MISSING_SENTINEL if sentinel is None else sentinel
        self._frame.to_csv(path, index=False, na_rep=sentinel)

    def _check(self, name: str, kind: Optional[NodeKind] = None) -> None:
        if name not in self._schema:
            raise SchemaError(f"Unknown column: {name}", [name])
        if kind is not None and self._schema[name] != kind:
            raise SchemaError(f"Column '{name}' is {self._schema[name].value}, expected {kind.value}", [name])

    def __repr__(self) -> str:
        return f"MixedTable({self.n_rows} rows, {len(self._schema)} columns, {self.n_missing} missing)"


def read_table(
    path: Path,
    schema: Mapping[str, NodeKind],
    sentinel: Optional[str] = None,
    percentage: Iterable[str] = (),
) -> MixedTable:
    """
    Read a CSV with a header row into a MixedTable.

    Args:
        path: CSV file
        schema: Column name -> kind, in the desired column order
        sentinel: String marking a missing cell (empty fields are missing too)
        percentage: Continuous columns on a 0-100 scale

    Raises:
        SchemaError: Naming columns that are missing or not numeric
    """
    sentinel = settings.MISSING_SENTINEL if sentinel is None else sentinel
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, na_values=["", sentinel])
    extra = [c for c in frame.columns if c not in schema]
    if extra:
        logger.warning(f"Ignoring columns not declared in schema: {extra}")
    table = MixedTable(frame, schema, percentage)
    logger.info(f"Loaded {path}: {table}")
    return table
