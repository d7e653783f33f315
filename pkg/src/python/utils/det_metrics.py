# src/python/utils/det_metrics.py

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .constants import ErrorCode
from .exceptions import MetricsError
from .logger import get_logger
from .types import DetCostParams, OperatingPoint

logger = get_logger(__name__)

DET_CSV_HEADER = "threshold,p_miss,p_fa"

def cost_weights(params: DetCostParams) -> tuple[float, float]:
    """
    Weights of the normalized detection cost, ``dcf_norm = w_miss * p_miss + w_fa * p_fa``.

    The normalizer is the cost of the better trivial system,
    ``min(c_miss * p_target, c_fa * (1 - p_target))``. Dividing it out leaves a
    weight of exactly 1 on the side that defines the normalizer and a ratio on
    the other side. With the challenge constants this is ``(1.0, 9.9)``.

    :param params: The cost parameters.
    :type params: :py:class:`~src.python.utils.types.DetCostParams`

    :returns: ``(w_miss, w_fa)``.
    :rtype: tuple[float, float]
    """
    miss_side = params.c_miss * params.p_target
    fa_side = params.c_fa * (1.0 - params.p_target)
    if miss_side <= fa_side:
        return 1.0, (params.c_fa / params.c_miss) * ((1.0 - params.p_target) / params.p_target)
    return (params.c_miss / params.c_fa) * (params.p_target / (1.0 - params.p_target)), 1.0

def dcf_at(point: OperatingPoint, params: DetCostParams = DetCostParams()) -> tuple[float, float]:
    """
    Detection cost at one operating point.

    ``dcf = c_miss * p_miss * p_target + c_fa * p_fa * (1 - p_target)``, and its
    normalized form ``dcf / min(c_miss * p_target, c_fa * (1 - p_target))``.

    :param point: The operating point.
    :type point: :py:class:`~src.python.utils.types.OperatingPoint`
    :param params: The cost parameters, challenge defaults when omitted.
    :type params: :py:class:`~src.python.utils.types.DetCostParams`

    :returns: ``(dcf, dcf_norm)``.
    :rtype: tuple[float, float]
    """
    dcf = (params.c_miss * point.p_miss * params.p_target
           + params.c_fa * point.p_fa * (1.0 - params.p_target))
    w_miss, w_fa = cost_weights(params)
    return dcf, w_miss * point.p_miss + w_fa * point.p_fa

@dataclass(frozen=True)
class DetSweep:
    """
    The empirical threshold sweep of one score set.

    Thresholds are the distinct scores in ascending order, preceded and followed
    by the adjacent representable doubles so that accept-all and reject-all are
    always present. A score is accepted iff ``score >= threshold``. Counts are
    exact integers; probabilities are formed by a single division.
    """
    thresholds: npt.NDArray[np.float64]
    miss_counts: npt.NDArray[np.int64]
    fa_counts: npt.NDArray[np.int64]
    n_target: int
    n_nontarget: int

    @classmethod
    def from_scores(cls, scores: npt.ArrayLike, is_target: npt.ArrayLike) -> 'DetSweep':
        """
        :param scores: LLR scores.
        :type scores: array-like of float
        :param is_target: Target flags aligned with ``scores``.
        :type is_target: array-like of bool

        :rtype: DetSweep
        :raises MetricsError: ``LengthMismatch`` for misaligned inputs,
            ``DegenerateKey`` without targets or without nontargets.
        """
        scores = np.asarray(scores, dtype=np.float64)
        flags = np.asarray(is_target, dtype=bool)
        if scores.shape != flags.shape or scores.ndim != 1:
            raise MetricsError(ErrorCode.LENGTH_MISMATCH,
                               f"{scores.size} scores for {flags.size} key rows")

        targets = np.sort(scores[flags])
        nontargets = np.sort(scores[~flags])
        if targets.size == 0 or nontargets.size == 0:
            raise MetricsError(ErrorCode.DEGENERATE_KEY,
                               f"Need at least one target and one nontarget "
                               f"(got {targets.size} and {nontargets.size})")

        distinct = np.unique(scores)
        thresholds = np.concatenate((
            [np.nextafter(distinct[0], -np.inf)],
            distinct,
            [np.nextafter(distinct[-1], np.inf)],
        ))
        miss_counts = np.searchsorted(targets, thresholds, side='left').astype(np.int64)
        fa_counts = (nontargets.size - np.searchsorted(nontargets, thresholds, side='left')).astype(np.int64)

        logger.debug(f"Sweep over {thresholds.size} thresholds "
                     f"({targets.size} targets, {nontargets.size} nontargets)")
        return cls(thresholds, miss_counts, fa_counts, int(targets.size), int(nontargets.size))

    @property
    def p_miss(self) -> npt.NDArray[np.float64]:
        return self.miss_counts / self.n_target

    @property
    def p_fa(self) -> npt.NDArray[np.float64]:
        return self.fa_counts / self.n_nontarget

    def points(self) -> tuple[OperatingPoint, ...]:
        """One operating point per threshold, ascending."""
        return tuple(OperatingPoint(float(t), float(m), float(f))
                     for t, m, f in zip(self.thresholds, self.p_miss, self.p_fa))

    def min_dcf(self, params: DetCostParams = DetCostParams()) -> tuple[float, float]:
        """
        Minimum normalized DCF over the sweep. Ties go to the lowest threshold.

        :rtype: tuple[float, float]
        """
        w_miss, w_fa = cost_weights(params)
        costs = w_miss * self.p_miss + w_fa * self.p_fa
        best = int(np.argmin(costs))
        return float(costs[best]), float(self.thresholds[best])

    def eer(self) -> float:
        """
        Equal error rate on the step sweep. When no point has ``p_miss == p_fa``
        the two points bracketing the sign change of ``p_miss - p_fa`` are
        joined linearly.

        :rtype: float
        """
        p_miss, p_fa = self.p_miss, self.p_fa
        diff = p_miss - p_fa
        i = int(np.argmax(diff >= 0))
        if diff[i] == 0:
            return float(p_miss[i])
        d0, d1 = diff[i - 1], diff[i]
        t = -d0 / (d1 - d0)
        return float(p_miss[i - 1] + t * (p_miss[i] - p_miss[i - 1]))

def det_sweep(scores: npt.ArrayLike, is_target: npt.ArrayLike) -> tuple[OperatingPoint, ...]:
    """
    Operating points over all candidate thresholds, ascending. ``p_miss`` is
    nondecreasing and ``p_fa`` nonincreasing along the sequence.

    :param scores: LLR scores.
    :type scores: array-like of float
    :param is_target: Target flags aligned with ``scores``.
    :type is_target: array-like of bool

    :rtype: tuple[:py:class:`~src.python.utils.types.OperatingPoint`, ...]
    :raises MetricsError: ``DegenerateKey`` or ``LengthMismatch``.
    """
    return DetSweep.from_scores(scores, is_target).points()

def min_dcf(scores: npt.ArrayLike, is_target: npt.ArrayLike,
            params: DetCostParams = DetCostParams()) -> tuple[float, float]:
    """
    Normalized minimum DCF and the threshold where it is reached.

    :param scores: LLR scores.
    :type scores: array-like of float
    :param is_target: Target flags aligned with ``scores``.
    :type is_target: array-like of bool
    :param params: Cost parameters.
    :type params: :py:class:`~src.python.utils.types.DetCostParams`

    :returns: ``(min_dcf_norm, argmin_threshold)``, the value lies in [0, 1].
    :rtype: tuple[float, float]
    :raises MetricsError: ``DegenerateKey`` or ``LengthMismatch``.
    """
    return DetSweep.from_scores(scores, is_target).min_dcf(params)

def eer(scores: npt.ArrayLike, is_target: npt.ArrayLike) -> float:
    """
    Equal error rate, linearly interpolated on the step sweep.

    :param scores: LLR scores.
    :type scores: array-like of float
    :param is_target: Target flags aligned with ``scores``.
    :type is_target: array-like of bool

    :rtype: float
    :raises MetricsError: ``DegenerateKey`` or ``LengthMismatch``.
    """
    return DetSweep.from_scores(scores, is_target).eer()

def export_det(points: tuple[OperatingPoint, ...] | list[OperatingPoint]) -> str:
    """
    Renders a sweep as CSV with six decimals per value.

    :param points: Nonempty operating point sequence.
    :type points: sequence of :py:class:`~src.python.utils.types.OperatingPoint`

    :returns: ``threshold,p_miss,p_fa`` header plus one row per point.
    :rtype: str
    :raises MetricsError: ``EmptySweep`` when there is nothing to export.
    """
    if not points:
        raise MetricsError(ErrorCode.EMPTY_SWEEP, "No operating points to export")
    rows = [DET_CSV_HEADER]
    rows.extend(f"{p.threshold:.6f},{p.p_miss:.6f},{p.p_fa:.6f}" for p in points)
    return '\n'.join(rows) + '\n'
