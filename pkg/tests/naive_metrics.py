"""Naive per-record metric implementations used as independent oracles.

Deliberately written as plain loops over (true, pred) ordinal pairs with
no imports from the library's metrics module, so they cannot share a bug
with the code they check.
"""

from __future__ import annotations

LABELS = ["UNCERTAIN", "UNSUPPORTED", "PARTIALLY_SUPPORTED", "SUPPORTED"]
ORDINAL = {name: i for i, name in enumerate(LABELS)}
MAX_DISTANCE = 3


def naive_weighted_accuracy(pairs: list[tuple[str, str]]) -> float:
    total_penalty = 0
    for true, pred in pairs:
        total_penalty += abs(ORDINAL[true] - ORDINAL[pred])
    return 1.0 - total_penalty / (len(pairs) * MAX_DISTANCE)


def naive_ordinal_mae(pairs: list[tuple[str, str]]) -> tuple[float, float]:
    total = 0
    for true, pred in pairs:
        total += abs(ORDINAL[true] - ORDINAL[pred])
    raw = total / len(pairs)
    return raw, raw / MAX_DISTANCE


def naive_accuracy(pairs: list[tuple[str, str]]) -> float:
    return sum(1 for true, pred in pairs if true == pred) / len(pairs)


def naive_kappa(pairs: list[tuple[str, str]]) -> float:
    n = len(pairs)
    p_o = naive_accuracy(pairs)
    p_e = 0.0
    for label in LABELS:
        true_count = sum(1 for t, _ in pairs if t == label)
        pred_count = sum(1 for _, p in pairs if p == label)
        p_e += (true_count / n) * (pred_count / n)
    if p_e >= 1.0:
        return 1.0 if p_o >= 1.0 else 0.0
    return (p_o - p_e) / (1.0 - p_e)


def naive_per_class_f1(pairs: list[tuple[str, str]]) -> dict[str, float]:
    f1s = {}
    for label in LABELS:
        tp = sum(1 for t, p in pairs if t == label and p == label)
        fp = sum(1 for t, p in pairs if t != label and p == label)
        fn = sum(1 for t, p in pairs if t == label and p != label)
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1s[label] = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return f1s


def naive_f1_macro(pairs: list[tuple[str, str]]) -> float:
    f1s = naive_per_class_f1(pairs)
    return sum(f1s.values()) / len(LABELS)


def naive_f1_weighted(pairs: list[tuple[str, str]]) -> float:
    f1s = naive_per_class_f1(pairs)
    n = len(pairs)
    total = 0.0
    for label in LABELS:
        support = sum(1 for t, _ in pairs if t == label)
        total += f1s[label] * support
    return total / n


def naive_char_jaccard(pred: str, true: str) -> float:
    pred_chars = set(ch for ch in pred.lower() if not ch.isspace())
    true_chars = set(ch for ch in true.lower() if not ch.isspace())
    if not pred_chars and not true_chars:
        return 1.0
    return len(pred_chars & true_chars) / len(pred_chars | true_chars)
