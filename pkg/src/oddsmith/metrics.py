"""Multiclass evaluation: accuracy, confusion matrix, classification report.

Labels are the three result codes: 0 = draw, 1 = home-side win, 2 = loss
(away-side win from the home perspective). Undefined precision/recall
(zero denominator) is reported as 0.0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

CLASSES = (0, 1, 2)


class LengthMismatch(ValueError):
    pass


class Empty(ValueError):
    pass


class UnknownLabel(ValueError):
    pass


def _as_labels(y_true, y_pred, allow_any: bool = False) -> tuple[np.ndarray, np.ndarray]:
    t = np.asarray(y_true)
    p = np.asarray(y_pred)
    if t.shape != p.shape or t.ndim != 1:
        raise LengthMismatch(f"y_true has {t.shape}, y_pred has {p.shape}")
    if t.size == 0:
        raise Empty("no instances to evaluate")
    if not allow_any:
        for name, arr in (("y_true", t), ("y_pred", p)):
            bad = set(np.unique(arr)) - set(CLASSES)
            if bad:
                raise UnknownLabel(f"{name} contains labels outside {CLASSES}: {sorted(bad)}")
    return t.astype(int), p.astype(int)


def accuracy(y_true, y_pred) -> float:
    """Fraction of predictions equal to the true label."""
    t, p = _as_labels(y_true, y_pred, allow_any=True)
    return float(np.mean(t == p))


@dataclass(frozen=True)
class ConfusionMatrix:
    """counts[i][j] = number of instances with true class i predicted as j."""

    counts: tuple[tuple[int, ...], ...]
    classes: tuple[int, ...] = CLASSES

    @property
    def total(self) -> int:
        return int(sum(sum(row) for row in self.counts))

    def support(self, cls: int) -> int:
        return int(sum(self.counts[cls]))

    def as_array(self) -> np.ndarray:
        return np.array(self.counts, dtype=int)

    def __str__(self) -> str:
        header = "true\\pred " + " ".join(f"{c:>6d}" for c in self.classes)
        rows = [
            f"{c:>9d} " + " ".join(f"{n:>6d}" for n in row)
            for c, row in zip(self.classes, self.counts)
        ]
        return "\n".join([header, *rows])


def confusion(y_true, y_pred) -> ConfusionMatrix:
    """Three-class confusion matrix over the fixed class order (0, 1, 2)."""
    t, p = _as_labels(y_true, y_pred)
    m = np.zeros((3, 3), dtype=int)
    np.add.at(m, (t, p), 1)
    return ConfusionMatrix(counts=tuple(tuple(int(v) for v in row) for row in m))


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    """Accuracy plus per-class and aggregated precision/recall/F1.

    micro equals accuracy for single-label multiclass; macro is the
    unweighted mean over the three classes; weighted is the
    support-weighted mean.
    """

    accuracy: float
    confusion: ConfusionMatrix
    per_class: dict[int, ClassScores]
    micro: tuple[float, float, float]
    macro: tuple[float, float, float]
    weighted: tuple[float, float, float]
    labels: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "confusion": [list(row) for row in self.confusion.counts],
            "per_class": {
                str(c): {
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                    "support": s.support,
                }
                for c, s in self.per_class.items()
            },
            "micro": list(self.micro),
            "macro": list(self.macro),
            "weighted": list(self.weighted),
            "labels": dict(self.labels),
        }

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)

    def to_text(self, title: str = "") -> str:
        """Aligned table in the style Accuracy | Class | Precision | Recall | F-1."""
        lines = []
        if title:
            lines.append(title)
        lines.append(f"{'Accuracy':>8}  {'Class':>5}  {'Precision':>9}  {'Recall':>6}  {'F-1 Score':>9}")
        for i, c in enumerate(CLASSES):
            s = self.per_class[c]
            acc = f"{self.accuracy:.2f}" if i == 0 else ""
            lines.append(f"{acc:>8}  {c:>5d}  {s.precision:>9.2f}  {s.recall:>6.2f}  {s.f1:>9.2f}")
        return "\n".join(lines)

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        return cls(
            accuracy=d["accuracy"],
            confusion=ConfusionMatrix(counts=tuple(tuple(row) for row in d["confusion"])),
            per_class={
                int(c): ClassScores(s["precision"], s["recall"], s["f1"], s["support"])
                for c, s in d["per_class"].items()
            },
            micro=tuple(d["micro"]),
            macro=tuple(d["macro"]),
            weighted=tuple(d["weighted"]),
            labels=dict(d.get("labels", {})),
        )


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def report(y_true, y_pred) -> EvalReport:
    """Full classification report from true/predicted class codes."""
    cm = confusion(y_true, y_pred)
    m = cm.as_array()
    total = cm.total

    per_class = {}
    for c in CLASSES:
        tp = float(m[c, c])
        fp = float(m[:, c].sum() - m[c, c])
        fn = float(m[c, :].sum() - m[c, c])
        prec = _safe_div(tp, tp + fp)
        rec = _safe_div(tp, tp + fn)
        f1 = _safe_div(2 * prec * rec, prec + rec)
        per_class[c] = ClassScores(prec, rec, f1, int(m[c, :].sum()))

    acc = float(np.trace(m)) / total
    micro = (acc, acc, acc)
    macro = tuple(
        float(np.mean([getattr(per_class[c], k) for c in CLASSES]))
        for k in ("precision", "recall", "f1")
    )
    weighted = tuple(
        float(sum(getattr(per_class[c], k) * per_class[c].support for c in CLASSES) / total)
        for k in ("precision", "recall", "f1")
    )
    return EvalReport(
        accuracy=acc,
        confusion=cm,
        per_class=per_class,
        micro=micro,
        macro=macro,
        weighted=weighted,
    )
