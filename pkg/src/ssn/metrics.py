"""Confusion-matrix accounting and change-detection quality metrics.

Reports the usual five counts/ratios for a binary change map against
ground truth: false positives, false negatives, overall error, percentage
of correct classification, and Cohen's kappa (two-class form), plus the
measured computation time.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .features import binarize_truth

__all__ = ["ConfusionMatrix", "MetricsReport", "confusion", "metrics"]


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class MetricsReport:
    fp: int
    fn: int
    oe: int
    pcc: float
    kc: float
    ct_seconds: float

    def to_dict(self) -> dict:
        return {
            "fp": self.fp,
            "fn": self.fn,
            "oe": self.oe,
            "pcc": self.pcc,
            "kc": self.kc,
            "ct_seconds": self.ct_seconds,
        }

    def to_json_line(self, config_echo: dict | None = None) -> str:
        payload = self.to_dict()
        if config_echo is not None:
            payload["config"] = config_echo
        return json.dumps(payload)


def confusion(predicted, truth) -> ConfusionMatrix:
    """Count agreement of a predicted binary change map against ground truth.

    Changed is the positive class; any nonzero pixel counts as changed.
    """
    pred = np.asarray(predicted)
    true = np.asarray(truth)
    if pred.shape != true.shape:
        raise ValueError(
            f"prediction shape {pred.shape} does not match truth {true.shape}"
        )
    p = binarize_truth(pred)
    t = binarize_truth(true)
    tp = int(np.count_nonzero(p & t))
    tn = int(np.count_nonzero(~p & ~t))
    fp = int(np.count_nonzero(p & ~t))
    fn = int(np.count_nonzero(~p & t))
    return ConfusionMatrix(tp, tn, fp, fn)


def metrics(cm: ConfusionMatrix, ct_seconds: float) -> MetricsReport:
    """Derive FP/FN/OE/PCC/KC (percentages) from the confusion counts."""
    total = cm.total
    if total <= 0:
        raise ValueError("confusion matrix is empty")
    oe = cm.fp + cm.fn
    po = (cm.tp + cm.tn) / total
    pe = (
        (cm.tp + cm.fp) * (cm.tp + cm.fn) + (cm.tn + cm.fn) * (cm.tn + cm.fp)
    ) / total**2
    if pe >= 1.0:
        # Both marginals concentrated on one class: perfect agreement only.
        kc = 100.0 if po == 1.0 else 0.0
    else:
        kc = 100.0 * (po - pe) / (1.0 - pe)
    return MetricsReport(
        fp=cm.fp,
        fn=cm.fn,
        oe=oe,
        pcc=100.0 * po,
        kc=kc,
        ct_seconds=float(ct_seconds),
    )
