"""Match-data ingestion and the encoded design matrix.

The input is an fbref-style CSV with one row per team perspective of a
fixture (two rows per match). Descriptor columns are fixed; the statistic
roster is configurable. The pipeline is:

    load_csv -> prune_columns -> impute -> encode -> [normalize] -> split

Encoding follows the result-code convention used throughout the package:
venue Home=1 / Away=0, result W=1 / D=0 / L=2, team names mapped to
integers in order of first appearance in the chronological fixture list.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

DESCRIPTOR_COLUMNS = ("date", "season", "matchweek", "team", "opponent", "venue", "result")

# dropped by prune_columns; loaded as missing markers so pruning has
# something to act on even when the CSV carries text in them
PRUNE_COLUMNS = ("match report", "notes", "referee", "captain", "formation")

REQUIRED_STATS = ("gf", "ga", "xg", "xga", "sca", "gca", "sh", "sot", "poss")

# a 34-name fbref-flavoured roster; callers can pass their own
DEFAULT_STAT_ROSTER = (
    "gf", "ga", "xg", "xga", "poss",
    "sh", "sot", "dist", "fk", "pk", "pkatt",
    "sca", "gca",
    "cmp", "att", "cmp_pct", "prgp", "crs",
    "tkl", "tklw", "int", "blocks", "clr", "err",
    "touches", "carries", "prgc",
    "fls", "off", "crdy", "crdr",
    "sv", "save_pct", "cs",
)

# feature columns produced by encode() ahead of the statistic columns
ENCODED_DESCRIPTOR_FEATURES = ("venue_code", "team_code", "opponent_code")

VENUE_CODE = {"Home": 1, "Away": 0}
RESULT_CODE = {"W": 1, "D": 0, "L": 2}

_NA_TOKENS = {"", "na", "n/a", "nan", "none", "null"}


class MissingColumn(ValueError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"required column missing from CSV header: {name!r}")


class MalformedRow(ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class EmptyFile(ValueError):
    pass


class AllMissing(ValueError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"column {column!r} has no non-missing values to impute from")


class UnknownResult(ValueError):
    pass


class NoPriorMatches(ValueError):
    def __init__(self, team: str):
        self.team = team
        super().__init__(f"no prior matches this season for team {team!r}")


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class MatchRecord:
    """One team's perspective of one fixture."""

    date: dt.date
    season: str
    matchweek: int
    team: str
    opponent: str
    venue: str  # "Home" | "Away"
    result: str  # "W" | "D" | "L"
    stats: dict[str, float | None]

    def fixture_key(self) -> tuple[dt.date, str, str]:
        """(date, home team, away team) — identical for both perspectives."""
        if self.venue == "Home":
            return (self.date, self.team, self.opponent)
        return (self.date, self.opponent, self.team)


@dataclass(frozen=True)
class EncodingMaps:
    team_code: dict[str, int]
    venue_code: dict[str, int] = field(default_factory=lambda: dict(VENUE_CODE))
    result_code: dict[str, int] = field(default_factory=lambda: dict(RESULT_CODE))

    def team_name(self, code: int) -> str:
        for name, c in self.team_code.items():
            if c == code:
                return name
        raise KeyError(code)

    def venue_name(self, code: int) -> str:
        return {v: k for k, v in self.venue_code.items()}[code]

    def result_name(self, code: int) -> str:
        return {v: k for k, v in self.result_code.items()}[code]


@dataclass(frozen=True)
class NormalizationParams:
    """Per-feature min/max for the [0, 1] rescaling. Constant columns map to 0."""

    feature_names: tuple[str, ...]
    mins: np.ndarray
    maxs: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        span = self.maxs - self.mins
        out = np.where(span > 0, (X - self.mins) / np.where(span > 0, span, 1.0), 0.0)
        return out

    def invert(self, Xn: np.ndarray) -> np.ndarray:
        span = self.maxs - self.mins
        return Xn * span + self.mins

    def subset(self, names: list[str]) -> "NormalizationParams":
        idx = [self.feature_names.index(n) for n in names]
        return NormalizationParams(tuple(names), self.mins[idx], self.maxs[idx])


@dataclass(frozen=True)
class RowMeta:
    date: dt.date
    season: str
    matchweek: int
    team_id: int
    opponent_id: int
    fixture_id: int


class SplitVariant(str, Enum):
    TWO_SEASONS = "two_seasons"
    ONE_SEASON = "one_season"
    LAST_N_MATCHWEEKS = "last_n_matchweeks"


@dataclass(frozen=True)
class SplitSpec:
    """Training-window variant plus the chronological test tail.

    The test set is always the final `test_fraction` of fixtures by date,
    rounded to a fixture boundary, so accuracies are comparable across
    variants. The variant only changes the training window.
    """

    variant: SplitVariant
    n_matchweeks: int | None = None
    test_fraction: float = 0.2

    def __post_init__(self):
        if not (0.0 < self.test_fraction < 1.0):
            raise ValueError(f"test_fraction must be in (0, 1), got {self.test_fraction}")
        if self.variant is SplitVariant.LAST_N_MATCHWEEKS:
            if self.n_matchweeks is None or self.n_matchweeks < 1:
                raise ValueError("LAST_N_MATCHWEEKS requires n_matchweeks >= 1")

    def label(self) -> str:
        if self.variant is SplitVariant.LAST_N_MATCHWEEKS:
            return f"last_{self.n_matchweeks}_matchweeks"
        return self.variant.value


@dataclass(frozen=True)
class Dataset:
    """Encoded, chronologically sorted design matrix with label vector."""

    feature_names: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    meta: tuple[RowMeta, ...]
    encoders: EncodingMaps
    normalization: NormalizationParams | None = None

    def __post_init__(self):
        self.X.flags.writeable = False
        self.y.flags.writeable = False

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def feature_index(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise KeyError(f"unknown feature {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.feature_index(name)]

    def select_features(self, names: list[str]) -> "Dataset":
        idx = [self.feature_index(n) for n in names]
        norm = self.normalization.subset(list(names)) if self.normalization else None
        return replace(
            self,
            feature_names=tuple(names),
            X=self.X[:, idx].copy(),
            normalization=norm,
        )

    def take_rows(self, indices: np.ndarray) -> "Dataset":
        indices = np.asarray(indices)
        return replace(
            self,
            X=self.X[indices].copy(),
            y=self.y[indices].copy(),
            meta=tuple(self.meta[i] for i in indices),
        )

    def decode_row(self, i: int) -> dict[str, str]:
        """Recover the categorical descriptors for row i."""
        m = self.meta[i]
        venue = self.encoders.venue_name(int(self.column("venue_code")[i]))
        return {
            "venue": venue,
            "team": self.encoders.team_name(m.team_id),
            "opponent": self.encoders.team_name(m.opponent_id),
            "result": self.encoders.result_name(int(self.y[i])),
        }

    def fixture_row_groups(self) -> list[np.ndarray]:
        """Row indices grouped by fixture, in chronological fixture order."""
        ids = np.array([m.fixture_id for m in self.meta])
        groups: dict[int, list[int]] = {}
        for i, f in enumerate(ids):
            groups.setdefault(int(f), []).append(i)
        return [np.array(groups[f]) for f in sorted(groups)]

    def dates(self) -> list[dt.date]:
        return [m.date for m in self.meta]

    def to_dict(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "X": [[float(v) for v in row] for row in self.X],
            "y": [int(v) for v in self.y],
            "meta": [
                {
                    "date": m.date.isoformat(),
                    "season": m.season,
                    "matchweek": m.matchweek,
                    "team_id": m.team_id,
                    "opponent_id": m.opponent_id,
                    "fixture_id": m.fixture_id,
                }
                for m in self.meta
            ],
            "encoders": {
                "team_code": self.encoders.team_code,
                "venue_code": self.encoders.venue_code,
                "result_code": self.encoders.result_code,
            },
            "normalization": (
                None
                if self.normalization is None
                else {
                    "feature_names": list(self.normalization.feature_names),
                    "mins": [float(v) for v in self.normalization.mins],
                    "maxs": [float(v) for v in self.normalization.maxs],
                }
            ),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "Dataset":
        norm = d.get("normalization")
        return cls(
            feature_names=tuple(d["feature_names"]),
            X=np.array(d["X"], dtype=float).reshape(len(d["y"]), len(d["feature_names"])),
            y=np.array(d["y"], dtype=int),
            meta=tuple(
                RowMeta(
                    date=dt.date.fromisoformat(m["date"]),
                    season=m["season"],
                    matchweek=int(m["matchweek"]),
                    team_id=int(m["team_id"]),
                    opponent_id=int(m["opponent_id"]),
                    fixture_id=int(m["fixture_id"]),
                )
                for m in d["meta"]
            ),
            encoders=EncodingMaps(
                team_code={k: int(v) for k, v in d["encoders"]["team_code"].items()},
                venue_code={k: int(v) for k, v in d["encoders"]["venue_code"].items()},
                result_code={k: int(v) for k, v in d["encoders"]["result_code"].items()},
            ),
            normalization=(
                None
                if norm is None
                else NormalizationParams(
                    feature_names=tuple(norm["feature_names"]),
                    mins=np.array(norm["mins"], dtype=float),
                    maxs=np.array(norm["maxs"], dtype=float),
                )
            ),
        )

    @classmethod
    def from_json(cls, text: str) -> "Dataset":
        return cls.from_dict(json.loads(text))


def _parse_stat(column: str, raw: str, line: int, strict: bool) -> float | None:
    if column in PRUNE_COLUMNS:
        return None
    token = raw.strip()
    if token.lower() in _NA_TOKENS:
        return None
    try:
        return float(token)
    except ValueError:
        if strict:
            raise MalformedRow(line, f"non-numeric value {raw!r} in statistic column {column!r}")
        return None


def load_csv(path, schema: list[str] | None = None) -> list[MatchRecord]:
    """Read match records from a CSV file.

    `schema` lists the expected columns (descriptors may be included or
    assumed). With a schema, header columns outside it are ignored with a
    warning and non-numeric values in statistic columns are malformed-row
    errors; without one, every non-descriptor header column is taken as a
    statistic and unparseable values become missing markers.

    Line numbers in errors count the header as line 1.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFile(f"{path}: file has no header row") from None
        header = [h.strip() for h in header]

        for col in DESCRIPTOR_COLUMNS:
            if col not in header:
                raise MissingColumn(col)

        strict = schema is not None
        if schema is not None:
            wanted = [c for c in schema if c not in DESCRIPTOR_COLUMNS]
            for col in wanted:
                if col not in PRUNE_COLUMNS and col not in header:
                    raise MissingColumn(col)
            stat_cols = [c for c in wanted if c in header]
            known = set(DESCRIPTOR_COLUMNS) | set(wanted)
            extra = [c for c in header if c not in known]
            if extra:
                warnings.warn(f"ignoring columns not in schema: {extra}", stacklevel=2)
        else:
            stat_cols = [c for c in header if c not in DESCRIPTOR_COLUMNS]

        col_pos = {c: header.index(c) for c in header}
        records: list[MatchRecord] = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise MalformedRow(line_no, f"expected {len(header)} fields, found {len(row)}")

            def cell(col: str) -> str:
                return row[col_pos[col]].strip()

            try:
                date = dt.date.fromisoformat(cell("date"))
            except ValueError:
                raise MalformedRow(line_no, f"unparseable date {cell('date')!r}") from None
            venue = cell("venue")
            if venue not in VENUE_CODE:
                raise MalformedRow(line_no, f"venue must be Home or Away, got {venue!r}")
            result = cell("result")
            if result not in RESULT_CODE:
                raise MalformedRow(line_no, f"result must be W, D or L, got {result!r}")
            try:
                matchweek = int(cell("matchweek"))
            except ValueError:
                raise MalformedRow(line_no, f"matchweek {cell('matchweek')!r} is not an integer") from None
            if matchweek < 1:
                raise MalformedRow(line_no, f"matchweek must be >= 1, got {matchweek}")
            team, opponent = cell("team"), cell("opponent")
            if not team or not opponent:
                raise MalformedRow(line_no, "team and opponent must be non-empty")
            if team == opponent:
                raise MalformedRow(line_no, f"team equals opponent: {team!r}")

            stats = {c: _parse_stat(c, row[col_pos[c]], line_no, strict) for c in stat_cols}
            records.append(
                MatchRecord(
                    date=date,
                    season=cell("season"),
                    matchweek=matchweek,
                    team=team,
                    opponent=opponent,
                    venue=venue,
                    result=result,
                    stats=stats,
                )
            )

    if not records:
        raise EmptyFile(f"{path}: no data rows")

    if schema is None:
        # columns that never parsed are not statistics; drop them (prune
        # columns are kept so prune_columns has its documented effect)
        dead = [
            c
            for c in stat_cols
            if c not in PRUNE_COLUMNS and all(r.stats[c] is None for r in records)
        ]
        if dead:
            warnings.warn(f"dropping non-numeric columns: {dead}", stacklevel=2)
            records = [
                replace(r, stats={k: v for k, v in r.stats.items() if k not in dead})
                for r in records
            ]
    return records


def prune_columns(records: list[MatchRecord]) -> list[MatchRecord]:
    """Drop the descriptive text columns that carry no signal."""
    drop = set(PRUNE_COLUMNS)
    return [
        replace(r, stats={k: v for k, v in r.stats.items() if k.lower() not in drop})
        for r in records
    ]


class ImputeStrategy(str, Enum):
    MEAN = "mean"
    MEDIAN = "median"
    MODE = "mode"


def _fill_value(values: list[float], strategy: ImputeStrategy) -> float:
    arr = np.array(values, dtype=float)
    if strategy is ImputeStrategy.MEAN:
        return float(arr.mean())
    if strategy is ImputeStrategy.MEDIAN:
        return float(np.median(arr))
    uniq, counts = np.unique(arr, return_counts=True)
    return float(uniq[np.argmax(counts)])  # ties: smallest value (np.unique sorts)


def impute(
    records: list[MatchRecord], strategy: ImputeStrategy = ImputeStrategy.MEAN
) -> list[MatchRecord]:
    """Replace missing statistic values with a per-column fill value."""
    strategy = ImputeStrategy(strategy)
    columns: dict[str, list[float]] = {}
    for r in records:
        for k, v in r.stats.items():
            if v is not None:
                columns.setdefault(k, []).append(v)

    fills: dict[str, float] = {}
    for r in records:
        for k, v in r.stats.items():
            if v is None and k not in fills:
                if k not in columns:
                    raise AllMissing(k)
                fills[k] = _fill_value(columns[k], strategy)

    if not fills:
        return list(records)
    return [
        replace(r, stats={k: (fills[k] if v is None else v) for k, v in r.stats.items()})
        for r in records
    ]


def _check_chronology(records: list[MatchRecord]) -> None:
    by_team: dict[tuple[str, str], list[MatchRecord]] = {}
    for r in records:
        by_team.setdefault((r.season, r.team), []).append(r)
    for (season, team), rows in by_team.items():
        rows = sorted(rows, key=lambda r: r.matchweek)
        for a, b in zip(rows, rows[1:]):
            if b.matchweek == a.matchweek:
                raise ValueError(
                    f"{team!r} appears twice in matchweek {a.matchweek} of season {season!r}"
                )
            if b.date <= a.date:
                raise ValueError(
                    f"{team!r} season {season!r}: date does not increase from "
                    f"matchweek {a.matchweek} to {b.matchweek}"
                )


def encode(records: list[MatchRecord]) -> Dataset:
    """Turn pruned, imputed records into the sorted numeric Dataset."""
    if not records:
        raise EmptyFile("no records to encode")

    stat_names = tuple(records[0].stats.keys())
    for r in records:
        if tuple(r.stats.keys()) != stat_names:
            raise ValueError("records have inconsistent statistic rosters")
        for k, v in r.stats.items():
            if v is None:
                raise ValueError(f"missing value in column {k!r}; impute before encoding")
            if not np.isfinite(v):
                raise ValueError(f"non-finite value in column {k!r}")
        if r.result not in RESULT_CODE:
            raise UnknownResult(f"result must be W, D or L, got {r.result!r}")
    _check_chronology(records)

    # fixtures ordered by (date, first appearance in input); ids are dense
    first_seen: dict[tuple, int] = {}
    for pos, r in enumerate(records):
        first_seen.setdefault(r.fixture_key(), pos)
    fixture_id = {
        key: rank
        for rank, key in enumerate(sorted(first_seen, key=lambda k: (k[0], first_seen[k])))
    }

    order = sorted(
        range(len(records)),
        key=lambda i: (fixture_id[records[i].fixture_key()], VENUE_CODE[records[i].venue]),
    )

    team_code: dict[str, int] = {}
    for i in order:
        for name in (records[i].team, records[i].opponent):
            if name not in team_code:
                team_code[name] = len(team_code)

    feature_names = ENCODED_DESCRIPTOR_FEATURES + stat_names
    n = len(records)
    X = np.empty((n, len(feature_names)), dtype=float)
    y = np.empty(n, dtype=int)
    meta = []
    for row, i in enumerate(order):
        r = records[i]
        X[row, 0] = VENUE_CODE[r.venue]
        X[row, 1] = team_code[r.team]
        X[row, 2] = team_code[r.opponent]
        X[row, 3:] = [r.stats[k] for k in stat_names]
        y[row] = RESULT_CODE[r.result]
        meta.append(
            RowMeta(
                date=r.date,
                season=r.season,
                matchweek=r.matchweek,
                team_id=team_code[r.team],
                opponent_id=team_code[r.opponent],
                fixture_id=fixture_id[r.fixture_key()],
            )
        )

    return Dataset(
        feature_names=feature_names,
        X=X,
        y=y,
        meta=tuple(meta),
        encoders=EncodingMaps(team_code=team_code),
    )


def normalize(dataset: Dataset) -> tuple[Dataset, NormalizationParams]:
    """Min-max rescale every feature to [0, 1]; returns a copy."""
    if not np.all(np.isfinite(dataset.X)):
        raise ValueError("features must be finite before normalization")
    mins = dataset.X.min(axis=0)
    maxs = dataset.X.max(axis=0)
    params = NormalizationParams(dataset.feature_names, mins, maxs)
    normalized = replace(dataset, X=params.apply(dataset.X), normalization=params)
    return normalized, params


def season_average_substitute(dataset: Dataset, season: str, matchweek: int) -> Dataset:
    """Replace a matchweek's statistics with each team's prior-week means.

    Only statistic columns are substituted; the encoded descriptors
    (venue/team/opponent codes) are known pre-match and stay as they are.
    Labels and meta are untouched.
    """
    targets = [
        i
        for i, m in enumerate(dataset.meta)
        if m.season == season and m.matchweek == matchweek
    ]
    if not targets:
        raise ValueError(f"season {season!r} has no matchweek {matchweek}")

    stat_idx = [
        j
        for j, name in enumerate(dataset.feature_names)
        if name not in ENCODED_DESCRIPTOR_FEATURES
    ]
    X = dataset.X.copy()
    for i in targets:
        m = dataset.meta[i]
        prior = [
            j
            for j, pm in enumerate(dataset.meta)
            if pm.season == season and pm.team_id == m.team_id and pm.matchweek < matchweek
        ]
        if not prior:
            raise NoPriorMatches(dataset.encoders.team_name(m.team_id))
        X[np.ix_([i], stat_idx)] = dataset.X[np.ix_(prior, stat_idx)].mean(axis=0)

    return replace(dataset, X=X)


def split(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Chronological train/test split; test is the fixture-aligned tail."""
    groups = dataset.fixture_row_groups()
    n_fixtures = len(groups)
    n_test = int(round(n_fixtures * spec.test_fraction))
    if n_test < 1 or n_test >= n_fixtures:
        raise InsufficientData(
            f"{n_fixtures} fixtures cannot support a {spec.test_fraction:.0%} test tail"
        )
    boundary = n_fixtures - n_test
    head, tail = groups[:boundary], groups[boundary:]
    test_idx = np.concatenate(tail)

    def season_of(group: np.ndarray) -> str:
        return dataset.meta[int(group[0])].season

    if spec.variant is SplitVariant.TWO_SEASONS:
        seasons = []
        for g in head:
            s = season_of(g)
            if s not in seasons:
                seasons.append(s)
        if len(seasons) < 2:
            raise InsufficientData("two-season split needs at least two seasons of data")
        keep = set(seasons[-2:])
        train_groups = [g for g in head if season_of(g) in keep]
    elif spec.variant is SplitVariant.ONE_SEASON:
        last_season = season_of(head[-1])
        train_groups = [g for g in head if season_of(g) == last_season]
    else:
        def week_of(group: np.ndarray) -> tuple[str, int]:
            m = dataset.meta[int(group[0])]
            return (m.season, m.matchweek)

        weeks: list[tuple[str, int]] = []
        for g in head:
            w = week_of(g)
            if w not in weeks:
                weeks.append(w)
        if len(weeks) < spec.n_matchweeks:
            raise InsufficientData(
                f"only {len(weeks)} matchweeks before the test window, "
                f"need {spec.n_matchweeks}"
            )
        keep_weeks = set(weeks[-spec.n_matchweeks:])
        train_groups = [g for g in head if week_of(g) in keep_weeks]

    if not train_groups:
        raise InsufficientData("empty training window")
    train_idx = np.concatenate(train_groups)
    return dataset.take_rows(train_idx), dataset.take_rows(test_idx)
