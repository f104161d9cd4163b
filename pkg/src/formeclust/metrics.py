"""Clustering evaluation against gold labels.

Three scores are reported: V-measure (harmonic mean of homogeneity and
completeness, natural-log entropies), 1-to-1 accuracy (optimal injective
mapping of predicted to gold clusters), and many-to-1 accuracy (each
predicted cluster votes for its majority gold label). Random baselines
matching each are provided for calibration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

BASELINES = ("random_uniform", "assign_majority", "shuffle_gold")


@dataclass
class EvalReport:
    v_measure: float
    one_to_one: float
    many_to_one: float
    mapping: dict
    contingency: np.ndarray  # (K_pred, K_gold) counts
    n: int

    def as_dict(self) -> dict:
        return {
            "v_measure": self.v_measure,
            "one_to_one": self.one_to_one,
            "many_to_one": self.many_to_one,
            "mapping": {str(k): str(v) for k, v in self.mapping.items()},
            "n": self.n,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"

    def percent_lines(self) -> list[str]:
        return [
            f"V-measure:  {100 * self.v_measure:.1f}",
            f"1-to-1:     {100 * self.one_to_one:.1f}",
            f"many-to-1:  {100 * self.many_to_one:.1f}",
        ]


def _check_lengths(gold, pred) -> int:
    if len(gold) != len(pred):
        raise ValueError(f"label length mismatch: {len(gold)} vs {len(pred)}")
    if len(gold) == 0:
        raise ValueError("labels must be nonempty")
    return len(gold)


def contingency_table(gold, pred):
    """Count table (pred x gold) plus the distinct label values of each."""
    n = _check_lengths(gold, pred)
    gold_vals, gold_idx = np.unique(np.asarray(gold), return_inverse=True)
    pred_vals, pred_idx = np.unique(np.asarray(pred), return_inverse=True)
    table = np.zeros((pred_vals.size, gold_vals.size), dtype=np.int64)
    np.add.at(table, (pred_idx, gold_idx), 1)
    assert table.sum() == n
    return table, pred_vals, gold_vals


def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    nz = counts[counts > 0]
    p = nz / total
    return float(-(p * np.log(p)).sum())


def v_measure(gold, pred) -> float:
    """Harmonic mean of homogeneity and completeness, in [0, 1]."""
    table, _, _ = contingency_table(gold, pred)
    n = table.sum()
    h_gold = _entropy(table.sum(axis=0))
    h_pred = _entropy(table.sum(axis=1))
    # conditional entropies from the joint table
    h_gold_given_pred = 0.0
    h_pred_given_gold = 0.0
    for row in table:  # fixed predicted cluster
        if row.sum() > 0:
            h_gold_given_pred += row.sum() / n * _entropy(row)
    for col in table.T:  # fixed gold cluster
        if col.sum() > 0:
            h_pred_given_gold += col.sum() / n * _entropy(col)
    h = 1.0 if h_gold == 0 else 1.0 - h_gold_given_pred / h_gold
    c = 1.0 if h_pred == 0 else 1.0 - h_pred_given_gold / h_pred
    if h + c == 0:
        return 0.0
    return 2 * h * c / (h + c)


def _assignment(table: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Max-agreement assignment on a zero-padded square copy of the table."""
    k = max(table.shape)
    padded = np.zeros((k, k), dtype=np.int64)
    padded[: table.shape[0], : table.shape[1]] = table
    rows, cols = linear_sum_assignment(-padded)
    return rows, cols


def one_to_one(gold, pred) -> float:
    """Accuracy under the best injective predicted-to-gold label mapping."""
    table, _, _ = contingency_table(gold, pred)
    rows, cols = _assignment(table)
    matched = sum(
        int(table[r, c])
        for r, c in zip(rows, cols)
        if r < table.shape[0] and c < table.shape[1]
    )
    return matched / table.sum()


def many_to_one(gold, pred) -> float:
    """Accuracy when every predicted cluster maps to its majority gold label."""
    table, _, _ = contingency_table(gold, pred)
    # argmax per row; ties resolve to the lower gold index
    return float(table.max(axis=1).sum() / table.sum())


def evaluate(gold, pred) -> EvalReport:
    """Bundle the three scores with the mapping and contingency table."""
    table, pred_vals, gold_vals = contingency_table(gold, pred)
    rows, cols = _assignment(table)
    real = [(r, c) for r, c in zip(rows, cols) if r < table.shape[0] and c < table.shape[1]]
    mapping = {pred_vals[r].item(): gold_vals[c].item() for r, c in real}
    matched = sum(int(table[r, c]) for r, c in real)
    n = int(table.sum())
    return EvalReport(
        v_measure=v_measure(gold, pred),
        one_to_one=matched / n,
        many_to_one=many_to_one(gold, pred),
        mapping=mapping,
        contingency=table,
        n=n,
    )


def baseline(gold, kind: str, seed: int):
    """Reference labelings: uniform draws, the constant majority, or a shuffle."""
    gold = np.asarray(gold)
    if gold.size == 0:
        raise ValueError("gold labels must be nonempty")
    if kind not in BASELINES:
        raise ValueError(f"unknown baseline kind: {kind!r}")
    rng = np.random.Generator(np.random.PCG64(seed))
    values, counts = np.unique(gold, return_counts=True)
    if kind == "random_uniform":
        return values[rng.integers(values.size, size=gold.size)]
    if kind == "assign_majority":
        return np.full(gold.size, values[int(np.argmax(counts))])
    perm = rng.permutation(gold.size)
    return gold[perm]
