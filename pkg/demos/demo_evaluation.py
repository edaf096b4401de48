#!/usr/bin/env python3
"""Ordinal evaluation walkthrough on a small labeled record set.

The four support labels are ordered (UNCERTAIN=0 .. SUPPORTED=3), so a
SUPPORTED claim predicted UNCERTAIN is a worse mistake than one predicted
PARTIALLY_SUPPORTED. Weighted accuracy scales each error by its ordinal
distance; this demo contrasts it with plain accuracy.
"""

from citecheck.metrics import (
    ConfusionMatrix,
    EvalRecord,
    evaluate_dataset,
    render_table,
    weight_matrix,
    weighted_accuracy,
)
from citecheck.verifier import SupportLabel

S, P, N, U = (SupportLabel.SUPPORTED, SupportLabel.PARTIALLY_SUPPORTED,
              SupportLabel.UNSUPPORTED, SupportLabel.UNCERTAIN)

print("ordinal penalty matrix (rows true, cols predicted):")
print(weight_matrix())

# Two verifiers, same plain accuracy (50%), very different error severity.
near_misses = [
    EvalRecord(true_label=S, pred_label=S), EvalRecord(true_label=S, pred_label=P),
    EvalRecord(true_label=N, pred_label=N), EvalRecord(true_label=N, pred_label=U),
]
extreme_misses = [
    EvalRecord(true_label=S, pred_label=S), EvalRecord(true_label=S, pred_label=U),
    EvalRecord(true_label=N, pred_label=N), EvalRecord(true_label=U, pred_label=S),
]

for name, records in [("near-miss verifier", near_misses), ("extreme-miss verifier", extreme_misses)]:
    cm = ConfusionMatrix.from_records(records)
    report = evaluate_dataset(records)
    print(f"\n{name}: accuracy {report.standard_accuracy:.0%}, "
          f"weighted accuracy {weighted_accuracy(cm):.1%}, "
          f"ordinal MAE {report.ordinal_mae_raw:.2f}")

# A fuller report over a mixed record set, with the text-quality metrics.
records = [
    EvalRecord(S, S, "exercise lowers risk", "exercise lowers risk"),
    EvalRecord(S, P, "genome has 20,000 genes", "genome contains 20,000 genes"),
    EvalRecord(P, P, "coffee may lower risk", "coffee lowers cancer risk"),
    EvalRecord(N, N, "vitamin d cures all", "vitamin d cures everything"),
    EvalRecord(U, N, "results vary by age", "results vary"),
    EvalRecord(U, U, "unclear relationship", "unclear relationship"),
]
print("\nfull report:\n")
print(render_table(evaluate_dataset(records)))
