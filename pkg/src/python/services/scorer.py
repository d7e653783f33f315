# src/python/services/scorer.py

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Mapping

import jsonschema
import numpy as np
import numpy.typing as npt

from ..utils.constants import (
    ErrorCode, Partition, PHRASES, RateKind, SCHEMA_VERSION, SLICE_OK, SliceDimension,
    TaskType, TD_TRIAL_TYPES, TI_TRIAL_TYPES, phrase_language
)
from ..utils.det_metrics import DetSweep
from ..utils.exceptions import ApplicationError, MetricsError, TrialSemanticsError
from ..utils.logger import get_logger
from ..utils.resource_path import get_resource_path
from ..utils.types import DetCostParams, MetricsReport, SliceResult, TrialKey

logger = get_logger(__name__)

REPORT_SCHEMA_PATH = 'config/report_schema.json'
REPORT_DECIMALS = 6

@dataclass(frozen=True)
class SliceSpec:
    """
    A requested breakdown. ``label`` selects one slice of the dimension; None
    requests every slice of it.
    """
    dimension: SliceDimension
    label: str | None = None

    @classmethod
    def parse(cls, text: str) -> 'SliceSpec':
        """
        Reads ``dimension`` or ``dimension=label`` (e.g. ``partition=cross-lang``).

        :raises ValueError: On an unknown dimension.
        """
        dimension, _, label = text.strip().partition('=')
        return cls(SliceDimension(dimension.strip()), label.strip() or None)

def _flags(keys: list[TrialKey]) -> npt.NDArray[np.bool_]:
    return np.fromiter((k.is_target for k in keys), dtype=bool, count=len(keys))

def _check_lengths(scores: npt.ArrayLike, keys: list[TrialKey]) -> npt.NDArray[np.float64]:
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 1 or scores.size != len(keys):
        raise MetricsError(ErrorCode.LENGTH_MISMATCH,
                           f"{scores.size} scores for {len(keys)} key rows")
    return scores

def score_answer(scores: npt.ArrayLike, keys: list[TrialKey],
                 params: DetCostParams = DetCostParams()) -> MetricsReport:
    """
    Overall metrics of one answer against its key.

    :param scores: Scores aligned with ``keys``.
    :type scores: ScoreVector
    :param keys: The key rows.
    :type keys: list[:py:class:`~src.python.utils.types.TrialKey`]
    :param params: Cost parameters.
    :type params: :py:class:`~src.python.utils.types.DetCostParams`

    :returns: The report with DET points and counts, no breakdowns.
    :rtype: :py:class:`~src.python.utils.types.MetricsReport`
    :raises MetricsError: ``LengthMismatch`` or ``DegenerateKey``.
    """
    scores = _check_lengths(scores, keys)
    sweep = DetSweep.from_scores(scores, _flags(keys))
    min_dcf_norm, threshold = sweep.min_dcf(params)
    report = MetricsReport(
        min_dcf_norm=min_dcf_norm,
        eer=sweep.eer(),
        argmin_threshold=threshold,
        n_target=sweep.n_target,
        n_nontarget=sweep.n_nontarget,
        det_points=sweep.points(),
        task=keys[0].task,
    )
    logger.info(f"Scored {report.n_trials} trials: minDCF={report.min_dcf_norm:.6f} "
                f"EER={report.eer * 100:.2f}%")
    return report

def _subproblem(dimension: str, label: str, scores: npt.NDArray[np.float64],
                flags: npt.NDArray[np.bool_], mask: npt.NDArray[np.bool_],
                params: DetCostParams) -> SliceResult:
    """Scores the masked trials as an independent target/nontarget problem."""
    n_trials = int(mask.sum())
    n_target = int((flags & mask).sum())
    n_nontarget = n_trials - n_target
    if n_target == 0 or n_nontarget == 0:
        detail = "no trials" if n_trials == 0 else "slice lacks targets or nontargets"
        return SliceResult(dimension, label, n_trials, n_target, n_nontarget,
                           status=ErrorCode.EMPTY_SLICE.value, detail=detail)
    sweep = DetSweep.from_scores(scores[mask], flags[mask])
    min_dcf_norm, _ = sweep.min_dcf(params)
    return SliceResult(dimension, label, n_trials, n_target, n_nontarget,
                       status=SLICE_OK, min_dcf_norm=min_dcf_norm, eer=sweep.eer())

def _rate_at(dimension: str, label: str, scores: npt.NDArray[np.float64],
             flags: npt.NDArray[np.bool_], mask: npt.NDArray[np.bool_],
             threshold: float, kind: RateKind) -> SliceResult:
    """Miss or false-alarm rate of the masked trials at a fixed threshold."""
    n_trials = int(mask.sum())
    n_target = int((flags & mask).sum())
    if n_trials == 0:
        return SliceResult(dimension, label, 0, 0, 0, status=ErrorCode.EMPTY_SLICE.value,
                           rate_kind=kind.value, detail="no trials")
    subset = scores[mask]
    if kind is RateKind.MISS:
        errors = int(np.count_nonzero(subset < threshold))
    else:
        errors = int(np.count_nonzero(subset >= threshold))
    return SliceResult(dimension, label, n_trials, n_target, n_trials - n_target,
                       status=SLICE_OK, rate=errors / n_trials, rate_kind=kind.value)

def _slice_jobs(spec: SliceSpec, task: TaskType, keys: list[TrialKey],
                model_phrases: Mapping[str, str] | None) -> list[tuple[str, Any]]:
    """
    Expands one slice request into ``(label, selector)`` pairs. A selector is a
    trial mask, or a ``(mask, RateKind)`` pair for fixed-threshold rates.
    """
    dimension = spec.dimension
    n = len(keys)

    if dimension is SliceDimension.OVERALL:
        return [("all", np.ones(n, dtype=bool))]

    if dimension is SliceDimension.TRIAL_TYPE:
        types = TD_TRIAL_TYPES if task is TaskType.TEXT_DEPENDENT else TI_TRIAL_TYPES
        column = np.array([k.trial_type.value for k in keys])
        return [(t.value, (column == t.value, RateKind.MISS if t.is_target else RateKind.FALSE_ALARM))
                for t in types]

    if dimension is SliceDimension.PARTITION:
        column = np.array([k.partition.value for k in keys])
        labels = ([Partition.SAME_LANG.value, Partition.CROSS_LANG.value]
                  if task is TaskType.TEXT_INDEPENDENT else [Partition.NONE.value])
        return [(label, column == label) for label in labels]

    if model_phrases is None:
        raise TrialSemanticsError(ErrorCode.MISSING_PHRASE,
                                  f"'{dimension.value}' slices need the model phrase table")
    try:
        phrase_column = np.array([model_phrases[k.model_id] for k in keys])
    except KeyError as e:
        raise TrialSemanticsError(ErrorCode.MISSING_PHRASE,
                                  f"Model {e.args[0]!r} has no phrase id") from e

    if dimension is SliceDimension.PHRASE:
        labels = [p for p in PHRASES if p in set(phrase_column.tolist())]
        return [(p, phrase_column == p) for p in labels]

    language_column = np.array([phrase_language(p).value for p in phrase_column])
    return [(lang, language_column == lang) for lang in ("fa", "en")]

def breakdown_report(scores: npt.ArrayLike, keys: list[TrialKey],
                     params: DetCostParams = DetCostParams(),
                     slices: list[SliceSpec] | None = None,
                     model_phrases: Mapping[str, str] | None = None,
                     jobs: int = 1) -> MetricsReport:
    """
    Overall metrics plus per-slice breakdowns.

    * ``overall``, ``partition``, ``phrase`` and ``language`` slices are scored as
      independent target/nontarget sub-problems.
    * ``trial-type`` slices report, at the overall minDCF threshold, the miss
      rate of the target type and the false-alarm rate of every other type.
    * A slice without trials, or without both classes, is marked ``EmptySlice``
      and never aborts the report.

    :param scores: Scores aligned with ``keys``.
    :type scores: ScoreVector
    :param keys: The key rows.
    :type keys: list[:py:class:`~src.python.utils.types.TrialKey`]
    :param params: Cost parameters.
    :type params: :py:class:`~src.python.utils.types.DetCostParams`
    :param slices: Requested breakdowns; overall only when omitted.
    :type slices: list[:py:class:`SliceSpec`] or None
    :param model_phrases: Model id to phrase id, required for phrase and language slices.
    :type model_phrases: Mapping[str, str] or None
    :param jobs: Worker threads used for slice computation.
    :type jobs: int

    :rtype: :py:class:`~src.python.utils.types.MetricsReport`
    :raises MetricsError: ``LengthMismatch`` or ``DegenerateKey`` for the overall problem.
    :raises TrialSemanticsError: ``MissingPhrase`` when phrase information is needed but absent.
    """
    overall = score_answer(scores, keys, params)
    scores = _check_lengths(scores, keys)
    flags = _flags(keys)
    task = overall.task
    slices = slices or [SliceSpec(SliceDimension.OVERALL)]

    tasks = []
    for spec in slices:
        for label, selector in _slice_jobs(spec, task, keys, model_phrases):
            if spec.label is not None and label != spec.label:
                continue
            tasks.append((spec.dimension.value, label, selector))
        if spec.label is not None and not any(t[0] == spec.dimension.value and t[1] == spec.label
                                              for t in tasks):
            tasks.append((spec.dimension.value, spec.label, np.zeros(len(keys), dtype=bool)))

    def run(job: tuple[str, str, Any]) -> SliceResult:
        dimension, label, selector = job
        if isinstance(selector, tuple):
            mask, kind = selector
            return _rate_at(dimension, label, scores, flags, mask, overall.argmin_threshold, kind)
        return _subproblem(dimension, label, scores, flags, selector, params)

    if jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(job) for job in tasks]

    breakdowns: dict[str, dict[str, SliceResult]] = {}
    for result in results:
        breakdowns.setdefault(result.dimension, {})[result.label] = result
        if result.status != SLICE_OK:
            logger.warning(f"Slice {result.dimension}={result.label}: {result.status} ({result.detail})")

    return MetricsReport(
        min_dcf_norm=overall.min_dcf_norm,
        eer=overall.eer,
        argmin_threshold=overall.argmin_threshold,
        n_target=overall.n_target,
        n_nontarget=overall.n_nontarget,
        det_points=overall.det_points,
        breakdowns=breakdowns,
        task=task,
    )

def _round(value: float | None, decimals: int | None = REPORT_DECIMALS) -> float | None:
    if value is None:
        return None
    return float(value) if decimals is None else round(float(value), decimals)

def slice_to_dict(result: SliceResult, decimals: int | None = REPORT_DECIMALS) -> dict[str, Any]:
    """JSON shape of one slice; absent values are omitted."""
    doc: dict[str, Any] = {
        "n_trials": result.n_trials,
        "n_target": result.n_target,
        "n_nontarget": result.n_nontarget,
        "status": result.status,
    }
    if result.min_dcf_norm is not None:
        doc["min_dcf_norm"] = _round(result.min_dcf_norm, decimals)
        doc["eer"] = _round(result.eer, decimals)
    if result.rate_kind is not None:
        doc["rate_kind"] = result.rate_kind
        if result.rate is not None:
            doc["rate"] = _round(result.rate, decimals)
    if result.detail:
        doc["detail"] = result.detail
    return doc

def report_to_dict(report: MetricsReport, det_csv_path: str | None = None,
                   decimals: int | None = REPORT_DECIMALS) -> dict[str, Any]:
    """
    The machine-readable report: values rounded to six decimals unless told
    otherwise, EER also as a percentage with two decimals.

    :param report: The scoring result.
    :type report: :py:class:`~src.python.utils.types.MetricsReport`
    :param det_csv_path: Path of an exported DET CSV, when one was written.
    :type det_csv_path: str or None
    :param decimals: Rounding of metric values, None keeps full precision.
    :type decimals: int or None

    :rtype: dict[str, Any]
    """
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "task": int(report.task) if report.task is not None else None,
        "n_trials": report.n_trials,
        "n_target": report.n_target,
        "n_nontarget": report.n_nontarget,
        "min_dcf_norm": _round(report.min_dcf_norm, decimals),
        "eer": _round(report.eer, decimals),
        "eer_percent": round(report.eer * 100.0, 2),
        "argmin_threshold": _round(report.argmin_threshold, decimals),
        "breakdowns": {dimension: {label: slice_to_dict(result, decimals) for label, result in labels.items()}
                       for dimension, labels in report.breakdowns.items()},
    }
    if det_csv_path is not None:
        doc["det_csv_path"] = det_csv_path
    return doc

def load_report_schema() -> dict[str, Any]:
    """
    Loads the published JSON schema of the scoring report.

    :rtype: dict[str, Any]
    :raises ApplicationError: If the schema file is missing or malformed.
    """
    path = get_resource_path(REPORT_SCHEMA_PATH)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Cannot load report schema from {path}", exc_info=True)
        raise ApplicationError("The report schema could not be loaded.", original_exception=e) from e

def validate_report(doc: dict[str, Any]) -> None:
    """
    Checks a report document against the published schema.

    :param doc: Output of :py:func:`report_to_dict`.
    :type doc: dict[str, Any]

    :rtype: None
    :raises jsonschema.ValidationError: If the document does not conform.
    """
    jsonschema.validate(instance=doc, schema=load_report_schema())

def format_summary(report: MetricsReport) -> str:
    """
    Human-readable summary printed by the command line.

    :rtype: str
    """
    task = f"Task {int(report.task)}" if report.task is not None else "Key"
    lines = [
        f"{task}: {report.n_trials} trials ({report.n_target} target, {report.n_nontarget} nontarget)",
        f"  minDCF (normalized): {report.min_dcf_norm:.6f} at threshold {report.argmin_threshold:.6f}",
        f"  EER: {report.eer * 100:.2f}%",
    ]
    for dimension, labels in report.breakdowns.items():
        if dimension == SliceDimension.OVERALL.value:
            continue
        lines.append(f"  [{dimension}]")
        for label, result in labels.items():
            if result.status != SLICE_OK:
                lines.append(f"    {label:<12} {result.status} ({result.detail})")
            elif result.rate is not None:
                lines.append(f"    {label:<12} {result.rate_kind} rate {result.rate * 100:.2f}% "
                             f"over {result.n_trials} trials")
            else:
                lines.append(f"    {label:<12} minDCF {result.min_dcf_norm:.6f}  EER {result.eer * 100:.2f}%  "
                             f"({result.n_trials} trials)")
    return '\n'.join(lines)
