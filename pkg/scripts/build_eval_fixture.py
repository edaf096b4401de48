#!/usr/bin/env python3
"""Generate the 30-record evaluation fixture and its expected report.

The expected values come from the naive per-record oracle in
tests/naive_metrics.py, not from the library, so the committed report is
an independent cross-check. Run once; outputs are committed.
"""

import json
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from tests import naive_metrics  # noqa: E402

WORDS = [
    "exercise", "reduces", "cardiovascular", "risk", "genome", "contains",
    "protein", "coding", "genes", "vitamin", "supplementation", "prevents",
    "osteoporosis", "coffee", "compounds", "lower", "cancer", "studies",
    "suggest", "evidence", "conclusive", "approximately", "patients",
]


def make_text(rng: random.Random) -> str:
    return " ".join(rng.choices(WORDS, k=rng.randint(4, 14)))


def main() -> None:
    rng = random.Random(42)
    labels = list(naive_metrics.LABELS)
    records = []
    for _ in range(30):
        true_label = rng.choice(labels)
        # Predictions correlate with truth but include all error distances.
        roll = rng.random()
        if roll < 0.55:
            pred_label = true_label
        elif roll < 0.8:
            shift = rng.choice([-1, 1])
            idx = min(3, max(0, naive_metrics.ORDINAL[true_label] + shift))
            pred_label = labels[idx]
        else:
            pred_label = rng.choice(labels)
        true_text = make_text(rng)
        pred_text = true_text if rng.random() < 0.4 else make_text(rng)
        records.append(
            {
                "true_label": true_label,
                "pred_label": pred_label,
                "true_text": true_text,
                "pred_text": pred_text,
            }
        )

    pairs = [(r["true_label"], r["pred_label"]) for r in records]
    mae_raw, mae_norm = naive_metrics.naive_ordinal_mae(pairs)
    per_class_f1 = naive_metrics.naive_per_class_f1(pairs)
    char_sims = [naive_metrics.naive_char_jaccard(r["pred_text"], r["true_text"]) for r in records]
    length_diffs = [len(r["pred_text"].split()) - len(r["true_text"].split()) for r in records]

    expected = {
        "standard_accuracy": naive_metrics.naive_accuracy(pairs),
        "weighted_accuracy": naive_metrics.naive_weighted_accuracy(pairs),
        "f1_macro": naive_metrics.naive_f1_macro(pairs),
        "f1_weighted": naive_metrics.naive_f1_weighted(pairs),
        "cohens_kappa": naive_metrics.naive_kappa(pairs),
        "ordinal_mae_raw": mae_raw,
        "ordinal_mae_normalized": mae_norm,
        "char_similarity_mean": sum(char_sims) / len(char_sims),
        "length_diff_mean_words": sum(length_diffs) / len(length_diffs),
        "per_class": {
            label: {"f1": per_class_f1[label]} for label in labels
        },
        "n": 30,
    }

    data_dir = ROOT / "tests" / "data"
    data_dir.mkdir(parents=True, exist_ok=True)
    with open(data_dir / "eval_records_30.jsonl", "w") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")
    with open(data_dir / "eval_records_30_expected.json", "w") as fh:
        json.dump(expected, fh, indent=2)
    print(f"wrote {len(records)} records; accuracy={expected['standard_accuracy']:.4f} "
          f"weighted={expected['weighted_accuracy']:.4f}")


if __name__ == "__main__":
    main()
