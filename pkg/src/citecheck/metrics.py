"""Ordinal-aware evaluation of verifier outputs.

The four support labels form an ordered scale (UNCERTAIN=0, UNSUPPORTED=1,
PARTIALLY_SUPPORTED=2, SUPPORTED=3). Misclassifications are penalized by
their ordinal distance: the weight matrix is W(i,j) = |v(i) - v(j)| and

    weighted_accuracy = 1 - sum_ij W(i,j) * CM(i,j) / (N * max(W))

with max(W) = 3. Standard metrics (accuracy, per-class F1, Cohen's kappa),
ordinal MAE, and text-generation quality measures (character-level Jaccard
similarity, word-count difference) round out the report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from citecheck.verifier import SupportLabel

LABEL_ORDER = (
    SupportLabel.UNCERTAIN,
    SupportLabel.UNSUPPORTED,
    SupportLabel.PARTIALLY_SUPPORTED,
    SupportLabel.SUPPORTED,
)
N_CLASSES = len(LABEL_ORDER)
MAX_WEIGHT = N_CLASSES - 1


@dataclass(frozen=True)
class EvalRecord:
    true_label: SupportLabel
    pred_label: SupportLabel
    true_text: str = ""
    pred_text: str = ""


@dataclass(frozen=True)
class ConfusionMatrix:
    """4x4 counts; rows are true labels, columns predictions, ordinal order."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts)
        if counts.shape != (N_CLASSES, N_CLASSES):
            raise ValueError(f"confusion matrix must be {N_CLASSES}x{N_CLASSES}, got {counts.shape}")
        if (counts < 0).any():
            raise ValueError("confusion matrix cells must be non-negative")
        object.__setattr__(self, "counts", counts.astype(np.int64))

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_records(cls, records: Iterable[EvalRecord]) -> "ConfusionMatrix":
        counts = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
        for record in records:
            counts[record.true_label.ordinal, record.pred_label.ordinal] += 1
        return cls(counts)


def weight_matrix() -> np.ndarray:
    """Ordinal-distance penalties: symmetric, zero diagonal, max entry 3."""
    ordinals = np.arange(N_CLASSES)
    return np.abs(ordinals[:, None] - ordinals[None, :]).astype(np.float64)


def weighted_accuracy(cm: ConfusionMatrix) -> float:
    if cm.n == 0:
        raise ValueError("weighted accuracy is undefined for an empty confusion matrix")
    penalty = float((weight_matrix() * cm.counts).sum())
    return 1.0 - penalty / (cm.n * MAX_WEIGHT)


def ordinal_mae(records: Sequence[EvalRecord]) -> tuple[float, float]:
    """Mean absolute ordinal distance, raw (in [0,3]) and /3-normalized."""
    if not records:
        raise ValueError("ordinal MAE is undefined for zero records")
    distances = [abs(r.pred_label.ordinal - r.true_label.ordinal) for r in records]
    raw = sum(distances) / len(distances)
    return raw, raw / MAX_WEIGHT


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


def standard_metrics(records: Sequence[EvalRecord]) -> dict:
    """Accuracy, per-class precision/recall/F1, macro and weighted F1, kappa."""
    if not records:
        raise ValueError("metrics are undefined for zero records")
    cm = ConfusionMatrix.from_records(records)
    counts = cm.counts.astype(np.float64)
    n = cm.n
    diagonal = np.diag(counts)
    true_totals = counts.sum(axis=1)
    pred_totals = counts.sum(axis=0)

    per_class: dict[str, ClassScores] = {}
    f1s = np.zeros(N_CLASSES)
    for i, label in enumerate(LABEL_ORDER):
        precision = diagonal[i] / pred_totals[i] if pred_totals[i] > 0 else 0.0
        recall = diagonal[i] / true_totals[i] if true_totals[i] > 0 else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        f1s[i] = f1
        per_class[label.name] = ClassScores(
            precision=float(precision), recall=float(recall), f1=float(f1), support=int(true_totals[i])
        )

    accuracy = float(diagonal.sum() / n)
    f1_macro = float(f1s.mean())
    f1_weighted = float((f1s * true_totals).sum() / n)

    p_o = accuracy
    p_e = float((true_totals / n) @ (pred_totals / n))
    if p_e >= 1.0:
        kappa = 1.0 if p_o >= 1.0 else 0.0
    else:
        kappa = (p_o - p_e) / (1.0 - p_e)

    return {
        "accuracy": accuracy,
        "per_class": per_class,
        "f1_macro": f1_macro,
        "f1_weighted": f1_weighted,
        "cohens_kappa": float(kappa),
    }


def char_jaccard(pred_text: str, true_text: str) -> float:
    """Jaccard similarity of unique-character sets, lowercased, whitespace removed."""
    pred_set = set("".join(pred_text.lower().split()))
    true_set = set("".join(true_text.lower().split()))
    if not pred_set and not true_set:
        return 1.0
    return len(pred_set & true_set) / len(pred_set | true_set)


def length_diff_words(pred_text: str, true_text: str) -> int:
    """Word-count deviation, prediction minus ground truth."""
    return len(pred_text.split()) - len(true_text.split())


@dataclass(frozen=True)
class EvaluationReport:
    standard_accuracy: float
    weighted_accuracy: float
    f1_macro: float
    f1_weighted: float
    cohens_kappa: float
    ordinal_mae_raw: float
    ordinal_mae_normalized: float
    char_similarity_mean: float
    length_diff_mean_words: float
    per_class: dict[str, ClassScores]
    n: int

    def to_dict(self) -> dict:
        return {
            "standard_accuracy": self.standard_accuracy,
            "weighted_accuracy": self.weighted_accuracy,
            "f1_macro": self.f1_macro,
            "f1_weighted": self.f1_weighted,
            "cohens_kappa": self.cohens_kappa,
            "ordinal_mae_raw": self.ordinal_mae_raw,
            "ordinal_mae_normalized": self.ordinal_mae_normalized,
            "char_similarity_mean": self.char_similarity_mean,
            "length_diff_mean_words": self.length_diff_mean_words,
            "per_class": {
                name: {
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                    "support": s.support,
                }
                for name, s in self.per_class.items()
            },
            "n": self.n,
        }


def evaluate_dataset(records: Sequence[EvalRecord]) -> EvaluationReport:
    if not records:
        raise ValueError("cannot evaluate zero records")
    cm = ConfusionMatrix.from_records(records)
    std = standard_metrics(records)
    mae_raw, mae_norm = ordinal_mae(records)
    char_sims = [char_jaccard(r.pred_text, r.true_text) for r in records]
    length_diffs = [length_diff_words(r.pred_text, r.true_text) for r in records]
    return EvaluationReport(
        standard_accuracy=std["accuracy"],
        weighted_accuracy=weighted_accuracy(cm),
        f1_macro=std["f1_macro"],
        f1_weighted=std["f1_weighted"],
        cohens_kappa=std["cohens_kappa"],
        ordinal_mae_raw=mae_raw,
        ordinal_mae_normalized=mae_norm,
        char_similarity_mean=sum(char_sims) / len(char_sims),
        length_diff_mean_words=sum(length_diffs) / len(length_diffs),
        per_class=std["per_class"],
        n=len(records),
    )


class RecordsFileError(Exception):
    """A records file line could not be parsed; carries the line number."""


def load_records(path: str | Path) -> list[EvalRecord]:
    """Read line-delimited JSON records {true_label, pred_label, true_text, pred_text}.

    Label strings accept both space and underscore variants. Errors name
    the offending line.
    """
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RecordsFileError(f"line {line_no}: invalid JSON ({exc})") from exc
            try:
                true_label = SupportLabel.parse(row["true_label"])
                pred_label = SupportLabel.parse(row["pred_label"])
            except KeyError as exc:
                raise RecordsFileError(f"line {line_no}: missing field {exc}") from exc
            except ValueError as exc:
                raise RecordsFileError(f"line {line_no}: {exc}") from exc
            records.append(
                EvalRecord(
                    true_label=true_label,
                    pred_label=pred_label,
                    true_text=row.get("true_text", ""),
                    pred_text=row.get("pred_text", ""),
                )
            )
    return records


def render_table(report: EvaluationReport) -> str:
    """Aligned text table: headline row plus per-class and ordinal blocks."""
    headline_cols = [
        ("Std. Acc.", f"{report.standard_accuracy * 100:.2f}%"),
        ("Weighted Acc.", f"{report.weighted_accuracy * 100:.2f}%"),
        ("F1-Macro", f"{report.f1_macro * 100:.2f}%"),
        ("F1-Weighted", f"{report.f1_weighted * 100:.2f}%"),
        ("Char. Sim.", f"{report.char_similarity_mean * 100:.2f}%"),
        ("Len. Diff.", f"{report.length_diff_mean_words:+.1f} words"),
    ]
    widths = [max(len(h), len(v)) for h, v in headline_cols]
    header = "  ".join(h.ljust(w) for (h, _), w in zip(headline_cols, widths))
    values = "  ".join(v.ljust(w) for (_, v), w in zip(headline_cols, widths))
    lines = [header, "-" * len(header), values, ""]
    lines.append(
        f"N = {report.n}   Cohen's kappa = {report.cohens_kappa:.4f}   "
        f"Ordinal MAE = {report.ordinal_mae_raw:.4f} (normalized {report.ordinal_mae_normalized:.4f})"
    )
    lines.append("")
    lines.append(f"{'Class':<21}{'Precision':>10}{'Recall':>10}{'F1':>10}{'Support':>9}")
    for label in reversed(LABEL_ORDER):
        s = report.per_class[label.name]
        lines.append(
            f"{label.name:<21}{s.precision:>10.4f}{s.recall:>10.4f}{s.f1:>10.4f}{s.support:>9d}"
        )
    return "\n".join(lines) + "\n"
