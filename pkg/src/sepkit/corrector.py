"""One-shot linear correctors for legacy decision rules.

A corrector wraps an existing classifier with a single linear test built
from one identified error sample: whiten the cloud of correctly handled
points, point a discriminant from their mean at the error sample, and
put the threshold midway between the error's response and the worst
correct point's response.  Construction is a mean, one covariance solve,
and one sweep; the legacy rule is never touched or retrained.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Hashable

import numpy as np

from .errors import DegenerateProbe, DimensionMismatch, InvalidArgument, NotSeparable
from .geometry import SampleSet, validate_point
from .separability import LinearFunctional, WhiteningTransform, whiten

Label = Hashable


@dataclass(frozen=True)
class LegacyModel:
    """Opaque deterministic decision rule plus its label vocabulary."""

    decision: Callable[[np.ndarray], Label]
    labels: tuple[Label, ...]


@dataclass(frozen=True)
class Corrector:
    """A linear discriminant in whitened coordinates that fires on the
    error sample it was built from and (by construction) on none of the
    correct samples seen at build time."""

    functional: LinearFunctional          # acts on whitened coordinates
    whitening: WhiteningTransform
    corrected_label: Label
    source_error_point: np.ndarray

    @property
    def n(self) -> int:
        return len(self.whitening.mean)

    def _raw_form(self) -> tuple[np.ndarray, float]:
        # <w, factor^T (x - mean)> - c  ==  <factor w, x> - (<factor w, mean> + c);
        # pre-combining keeps batched scoring at O(M n) instead of O(M n^2)
        # and keeps single-point and batched verdicts bit-identical.
        fw = self.whitening.factor @ self.functional.weights
        shift = float(np.dot(self.whitening.mean, fw)) + self.functional.offset
        return fw, shift

    def decide(self, x: np.ndarray) -> bool:
        x = validate_point(x)
        if len(x) != self.n:
            raise DimensionMismatch(f"point has dimension {len(x)}, corrector expects {self.n}")
        fw, shift = self._raw_form()
        return float(np.dot(fw, x)) - shift > 0.0

    def decide_batch(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        if pts.shape[1] != self.n:
            raise DimensionMismatch(f"points have dimension {pts.shape[1]}, corrector expects {self.n}")
        fw, shift = self._raw_form()
        return pts @ fw - shift > 0.0

    def to_json(self) -> str:
        doc = {
            "n": self.n,
            "weights": [float(v) for v in self.functional.weights],
            "offset": float(self.functional.offset),
            "whitening": {
                "mean": [float(v) for v in self.whitening.mean],
                "factor": [[float(v) for v in row] for row in self.whitening.factor],
                "lambda": float(self.whitening.lam),
            },
            "corrected_label": self.corrected_label,
        }
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str, source_error_point: np.ndarray | None = None) -> "Corrector":
        doc = json.loads(text)
        wh = WhiteningTransform(mean=np.asarray(doc["whitening"]["mean"], dtype=np.float64),
                                factor=np.asarray(doc["whitening"]["factor"], dtype=np.float64),
                                lam=float(doc["whitening"]["lambda"]),
                                condition_estimate=math.nan)
        fn = LinearFunctional(weights=np.asarray(doc["weights"], dtype=np.float64),
                              offset=float(doc["offset"]))
        src = source_error_point if source_error_point is not None else np.full(doc["n"], math.nan)
        return cls(functional=fn, whitening=wh, corrected_label=doc["corrected_label"],
                   source_error_point=np.asarray(src, dtype=np.float64))


@dataclass(frozen=True)
class CorrectionAudit:
    true_positive: bool
    false_positive_rate: float
    margin: float


def build_corrector(correct_set: SampleSet, error_point: np.ndarray, corrected_label: Label,
                    whitening_on: bool = True,
                    whitening: WhiteningTransform | None = None) -> Corrector:
    """Build the one-shot corrector for one error sample.

    The discriminant direction is the whitened offset of the error point
    from the correct set's mean; the threshold sits midway between the
    error's response and the largest response over the correct set.  Pass
    ``whitening`` to reuse a precomputed transform when building many
    correctors against the same correct set.

    Raises NotSeparable (with the violating margin attached) when no
    threshold splits the error from the correct set, and DegenerateProbe
    when the error point sits exactly on the mean.
    """
    error_point = validate_point(error_point)
    if correct_set.n != len(error_point):
        raise DimensionMismatch(
            f"error point has dimension {len(error_point)}, correct set has {correct_set.n}")

    if whitening is not None:
        transform = whitening
    elif whitening_on:
        transform = whiten(correct_set)
    else:
        transform = WhiteningTransform.identity(correct_set.points.mean(axis=0))

    w = transform.apply_point(error_point)
    wsq = float(np.dot(w, w))
    if wsq == 0.0:
        raise DegenerateProbe("error point coincides with the correct set's mean")

    # score(x) = <w, factor^T (x - mean)> computed as <factor w, x - mean>
    fw = transform.factor @ w
    responses = correct_set.points @ fw - float(np.dot(transform.mean, fw))
    worst = float(responses.max())
    if worst >= wsq:
        raise NotSeparable(
            "error point is not linearly separable from the correct set",
            margin=(wsq - worst) / math.sqrt(wsq))
    threshold = 0.5 * (wsq + worst)

    corrector = Corrector(functional=LinearFunctional(weights=w, offset=threshold),
                          whitening=transform, corrected_label=corrected_label,
                          source_error_point=error_point)
    if not corrector.decide(error_point):
        raise NotSeparable("threshold failed to fire on the error point", margin=0.0)
    return corrector


def corrected_decision(model: LegacyModel, corrector: Corrector, x: np.ndarray) -> Label:
    """The corrected system: the corrector's label where it fires, the
    untouched legacy decision everywhere else."""
    if corrector.decide(x):
        return corrector.corrected_label
    return model.decision(x)


def audit_corrector(corrector: Corrector, held_out_correct: SampleSet,
                    error_point: np.ndarray) -> CorrectionAudit:
    """Replay the corrector on held-out correct data.

    ``margin`` is the normalized gap between the error's response and the
    largest held-out response; negative means some held-out point out-scores
    the error sample."""
    if held_out_correct.m < 1:
        raise InvalidArgument("held-out set is empty")
    error_point = validate_point(error_point)
    fired = corrector.decide_batch(held_out_correct.points)
    fpr = float(np.mean(fired))
    w = corrector.functional.weights
    fw = corrector.whitening.factor @ w
    shift = float(np.dot(corrector.whitening.mean, fw))
    responses = held_out_correct.points @ fw - shift
    err_response = float(np.dot(error_point, fw)) - shift
    margin = (err_response - float(responses.max())) / float(np.linalg.norm(w))
    return CorrectionAudit(true_positive=corrector.decide(error_point),
                           false_positive_rate=fpr, margin=margin)
