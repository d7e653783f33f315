# src/python/services/audio_audit.py

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Any

from ..utils.constants import (
    ENROLLMENT_MAX_SECONDS, ENROLLMENT_MIN_SECONDS, ErrorCode, SCHEMA_VERSION, TaskType,
    TD_ENROLLMENT_COUNT, TEST_MAX_SECONDS, TEST_MIN_SECONDS
)
from ..utils.exceptions import AudioError
from ..utils.logger import get_logger
from ..utils.types import (
    AuditReport, AuditViolation, EnrollmentRecord, FileAudit, ModelAudit, VadParams
)
from ..utils.vad import net_speech_duration
from ..utils.wav_io import read_wav

logger = get_logger(__name__)

ENROLLMENT_DIR = "enrollment"
EVALUATION_DIR = "evaluation"
WAV_SUFFIX = ".wav"

def wav_path(wav_dir: str, role: str, file_id: str) -> str:
    """Location of an utterance in the ``wav/`` layout: ``<wav_dir>/<role>/<id>.wav``."""
    return os.path.join(wav_dir, role, file_id + WAV_SUFFIX)

def _measure(job: tuple[str, str, str], params: VadParams) -> tuple[FileAudit | None, AuditViolation | None, list[str]]:
    role, file_id, path = job
    notes: list[str] = []
    try:
        with open(path, 'rb') as f:
            data = f.read()
    except FileNotFoundError:
        return None, AuditViolation(ErrorCode.MISSING_FILE.value, file_id, f"{path} does not exist"), notes
    except OSError as e:
        return None, AuditViolation(ErrorCode.MISSING_FILE.value, file_id, f"{path} cannot be read ({e})"), notes

    try:
        info, samples = read_wav(data, notes)
    except AudioError as e:
        logger.warning(f"Cannot decode {path}: {e}")
        return None, AuditViolation(e.code.value, file_id, e.detail), notes

    net = net_speech_duration(samples, info.sample_rate, params)
    logger.debug(f"{role}/{file_id}: {info.duration:.3f}s total, {net:.3f}s speech")
    return FileAudit(file_id, role, info.duration, net, info.channels), None, [f"{file_id}: {n}" for n in notes]

def audit_corpus(models: list[EnrollmentRecord], wav_dir: str, task: TaskType | int | str,
                 params: VadParams = VadParams(), slack: float = 0.0,
                 test_ids: list[str] | None = None, jobs: int = 1) -> AuditReport:
    """
    Audits enrollment and evaluation audio against the duration rules.

    * Task 1 models must have exactly three enrollment utterances.
    * Task 2 models must net between 4 and 180 s of enrollment speech, and test
      files between 1 and 8 s, each bound widened by ``slack`` seconds.
    * Missing or undecodable files are recorded as violations and skipped.

    Files are processed in parallel when ``jobs > 1``; the report is ordered by
    file id regardless.

    :param models: Enrollment records.
    :type models: list[EnrollmentRecord]
    :param wav_dir: Root of the ``wav/`` tree (``enrollment/`` and ``evaluation/``).
    :type wav_dir: str
    :param task: The task.
    :type task: :py:class:`~src.python.utils.constants.TaskType`
    :param params: VAD parameters.
    :type params: :py:class:`~src.python.utils.types.VadParams`
    :param slack: Tolerance in seconds applied to every range check.
    :type slack: float
    :param test_ids: Evaluation files to audit; every ``.wav`` under
        ``evaluation/`` when omitted.
    :type test_ids: list[str] or None
    :param jobs: Worker threads.
    :type jobs: int

    :rtype: :py:class:`~src.python.utils.types.AuditReport`
    """
    task = TaskType.parse(task)

    enrollment_ids = sorted({u for record in models for u in record.enrollment_ids})
    if test_ids is None:
        evaluation_root = os.path.join(wav_dir, EVALUATION_DIR)
        test_ids = sorted(name[:-len(WAV_SUFFIX)] for name in os.listdir(evaluation_root)
                          if name.endswith(WAV_SUFFIX)) if os.path.isdir(evaluation_root) else []

    work = ([(ENROLLMENT_DIR, u, wav_path(wav_dir, ENROLLMENT_DIR, u)) for u in enrollment_ids]
            + [(EVALUATION_DIR, u, wav_path(wav_dir, EVALUATION_DIR, u)) for u in sorted(set(test_ids))])

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda job: _measure(job, params), work))
    else:
        results = [_measure(job, params) for job in work]

    files: list[FileAudit] = []
    violations: list[AuditViolation] = []
    warnings: list[str] = []
    for audit, violation, notes in results:
        if audit is not None:
            files.append(audit)
        if violation is not None:
            violations.append(violation)
        warnings.extend(notes)

    speech = {(f.role, f.file_id): f.net_speech for f in files}
    model_audits = []
    for record in sorted(models, key=lambda r: r.model_id):
        total = sum(speech.get((ENROLLMENT_DIR, u), 0.0) for u in record.enrollment_ids)
        model_audits.append(ModelAudit(record.model_id, len(record.enrollment_ids), total))

        if task is TaskType.TEXT_DEPENDENT:
            if len(record.enrollment_ids) != TD_ENROLLMENT_COUNT:
                violations.append(AuditViolation("enrollment-count", record.model_id,
                                                 f"{len(record.enrollment_ids)} enrollment utterances, "
                                                 f"expected {TD_ENROLLMENT_COUNT}"))
        elif not ENROLLMENT_MIN_SECONDS - slack <= total <= ENROLLMENT_MAX_SECONDS + slack:
            violations.append(AuditViolation("enrollment-duration", record.model_id,
                                             f"{total:.3f}s net enrollment speech outside "
                                             f"[{ENROLLMENT_MIN_SECONDS:g}, {ENROLLMENT_MAX_SECONDS:g}]s"))

    if task is TaskType.TEXT_INDEPENDENT:
        for audit in files:
            if audit.role == EVALUATION_DIR and not TEST_MIN_SECONDS - slack <= audit.net_speech <= TEST_MAX_SECONDS + slack:
                violations.append(AuditViolation("test-duration", audit.file_id,
                                                 f"{audit.net_speech:.3f}s net speech outside "
                                                 f"[{TEST_MIN_SECONDS:g}, {TEST_MAX_SECONDS:g}]s"))

    files.sort(key=lambda f: (f.file_id, f.role))
    violations.sort(key=lambda v: (v.subject, v.kind))
    logger.info(f"Audited {len(files)} files and {len(model_audits)} models: {len(violations)} violation(s).")
    return AuditReport(tuple(files), tuple(model_audits), tuple(violations), tuple(warnings))

def audit_to_dict(report: AuditReport, task: TaskType, params: VadParams) -> dict[str, Any]:
    """
    JSON form of an audit report.

    :rtype: dict[str, Any]
    """
    return {
        "schema_version": SCHEMA_VERSION,
        "task": int(task),
        "vad": {"frame_ms": params.frame_ms, "shift_ms": params.shift_ms, "threshold_db": params.threshold_db},
        "files": [{"file_id": f.file_id, "role": f.role, "duration": round(f.duration, 6),
                   "net_speech": round(f.net_speech, 6), "channels": f.channels} for f in report.files],
        "models": [{"model_id": m.model_id, "n_utterances": m.n_utterances,
                    "net_speech": round(m.net_speech, 6)} for m in report.models],
        "violations": [{"kind": v.kind, "subject": v.subject, "detail": v.detail} for v in report.violations],
        "warnings": list(report.warnings),
    }

def format_violations(report: AuditReport) -> str:
    """
    Human-readable violations table.

    :rtype: str
    """
    if not report.violations:
        return f"No violations ({len(report.files)} files, {len(report.models)} models)."
    kind_width = max(len("KIND"), *(len(v.kind) for v in report.violations))
    subject_width = max(len("SUBJECT"), *(len(v.subject) for v in report.violations))
    lines = [f"{'KIND':<{kind_width}}  {'SUBJECT':<{subject_width}}  DETAIL"]
    lines.extend(f"{v.kind:<{kind_width}}  {v.subject:<{subject_width}}  {v.detail}" for v in report.violations)
    return '\n'.join(lines)
