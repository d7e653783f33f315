# src/python/services/synth_generator.py

import hashlib
import io
import json
import math
import os
import zipfile
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import erfc

from .trial_keying import GenerationPolicy, generate_trials
from ..formats.answer import write_answer
from ..formats.enrollment import write_enrollment
from ..formats.metadata import write_metadata
from ..formats.trial_key import write_key
from ..formats.train_labels import write_train_labels
from ..formats.trials import write_trials
from ..formats.utterance_meta import write_utterance_meta
from ..utils._version import __version__
from ..utils.constants import (
    ErrorCode, FileNames, Gender, Language, PHRASES, SCHEMA_VERSION, TaskType,
    TD_ENROLLMENT_COUNT, TrialType, phrase_language
)
from ..utils.exceptions import SynthError
from ..utils.file_utils import atomic_write_bytes
from ..utils.logger import get_logger
from ..utils.types import (
    EnrollmentRecordTD, EnrollmentRecordTI, ScoreVector, SubmissionMetadata, TrainLabelTD,
    TrainLabelTI, Trial, TrialKey, UtteranceMeta
)

logger = get_logger(__name__)

PRNG_NAME = "PCG64"
CORPUS_STREAM = 0
SCORE_STREAM = 1
SUBMISSION_ZIP = "submission.zip"
_ZIP_TIMESTAMP = (1980, 1, 1, 0, 0, 0)

@dataclass(frozen=True)
class ScoreModel:
    """Gaussian score model: targets ~ N(mu_target, sigma^2), nontargets ~ N(mu_nontarget, sigma^2)."""
    mu_target: float = 1.0
    mu_nontarget: float = -1.0
    sigma: float = 1.0

@dataclass(frozen=True)
class SynthSpec:
    """
    Parameters of a synthetic corpus.

    For Task 1, ``utterances_per_speaker`` counts utterances per speaker and
    phrase: three enroll a model, the rest are test utterances. For Task 2 the
    first half (at least one) enroll, the rest are tests. ``gender_split`` is
    the probability of a speaker pair being female, ``language_mix`` the
    probability of a Task 2 test utterance being English.
    """
    seed: int = 0
    n_speakers: int = 10
    n_phrases: int = 2
    utterances_per_speaker: int = 5
    gender_split: float = 0.5
    language_mix: float = 0.5
    score_model: ScoreModel = field(default_factory=ScoreModel)
    caps: dict[str, int] = field(default_factory=dict)

    def check(self, task: TaskType) -> None:
        """
        :raises SynthError: ``InfeasibleSpec`` when the corpus cannot be built.
        """
        problems = []
        if not 0 <= self.seed < 2 ** 64:
            problems.append("seed must be a nonnegative 64-bit integer")
        if self.n_speakers < 1:
            problems.append("at least 1 speaker is needed")
        if not 1 <= self.n_phrases <= len(PHRASES):
            problems.append(f"n_phrases must lie in 1..{len(PHRASES)}")
        if self.score_model.sigma <= 0:
            problems.append("sigma must be positive")
        if not 0.0 <= self.gender_split <= 1.0 or not 0.0 <= self.language_mix <= 1.0:
            problems.append("gender_split and language_mix must lie in [0, 1]")
        minimum = TD_ENROLLMENT_COUNT + 1 if task is TaskType.TEXT_DEPENDENT else 2
        if self.utterances_per_speaker < minimum:
            problems.append(f"Task {int(task)} needs at least {minimum} utterances per speaker"
                            + (" and phrase" if task is TaskType.TEXT_DEPENDENT else ""))
        for name, cap in self.caps.items():
            if name not in TrialType.__members__ or cap < 0:
                problems.append(f"bad cap {name}={cap}")
        if problems:
            raise SynthError(ErrorCode.INFEASIBLE_SPEC, "; ".join(problems))

@dataclass(frozen=True)
class SynthBundle:
    """
    A generated corpus. ``files`` maps bundle-relative paths to their bytes,
    including ``manifest.json``.
    """
    task: TaskType
    spec: SynthSpec
    models: tuple
    trials: tuple[Trial, ...]
    keys: tuple[TrialKey, ...]
    meta: tuple[UtteranceMeta, ...]
    files: dict[str, bytes]

def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *stream]))

def _speaker_genders(n_speakers: int, gender_split: float, rng: np.random.Generator) -> list[Gender]:
    """Speakers come in same-gender pairs; an odd last speaker joins the last pair."""
    n_pairs = max(1, n_speakers // 2)
    pair_genders = [Gender.FEMALE if rng.random() < gender_split else Gender.MALE for _ in range(n_pairs)]
    return [pair_genders[min(i // 2, n_pairs - 1)] for i in range(n_speakers)]

def _ids(prefix: str, count: int, rng: np.random.Generator, width: int = 6) -> list[str]:
    """Unique ids in shuffled numbering, e.g. ``enr_000417``."""
    numbers = rng.permutation(count)
    return [f"{prefix}_{int(n):0{width}d}" for n in numbers]

def synth_scores(keys: list[TrialKey] | tuple[TrialKey, ...], model: ScoreModel, seed: int) -> ScoreVector:
    """
    Draws one score per key row: targets from N(mu_target, sigma^2), nontargets
    from N(mu_nontarget, sigma^2), in key order.

    :param keys: The key rows.
    :type keys: list[:py:class:`~src.python.utils.types.TrialKey`]
    :param model: The score model.
    :type model: :py:class:`ScoreModel`
    :param seed: Seed of the score stream.
    :type seed: int

    :rtype: ScoreVector
    """
    flags = np.fromiter((k.is_target for k in keys), dtype=bool, count=len(keys))
    noise = _rng(seed, SCORE_STREAM).standard_normal(len(keys))
    means = np.where(flags, model.mu_target, model.mu_nontarget)
    return means + model.sigma * noise

def expected_eer_gaussian(model: ScoreModel) -> float:
    """
    Analytic EER of the Gaussian score model, ``Phi(-(mu_t - mu_n) / (2 sigma))``
    with ``Phi(x) = erfc(-x / sqrt(2)) / 2``.

    :param model: The score model, ``sigma > 0``.
    :type model: :py:class:`ScoreModel`

    :rtype: float
    """
    x = -(model.mu_target - model.mu_nontarget) / (2.0 * model.sigma)
    return float(0.5 * erfc(-x / math.sqrt(2.0)))

def _build_td(spec: SynthSpec, rng: np.random.Generator):
    phrases = list(PHRASES)[:spec.n_phrases]
    speakers = [f"spk_{i + 1:06d}" for i in range(spec.n_speakers)]
    genders = _speaker_genders(spec.n_speakers, spec.gender_split, rng)

    n_tests_each = spec.utterances_per_speaker - TD_ENROLLMENT_COUNT
    enr_ids = iter(_ids("enr", spec.n_speakers * len(phrases) * TD_ENROLLMENT_COUNT, rng))
    evl_ids = iter(_ids("evl", spec.n_speakers * len(phrases) * n_tests_each, rng))

    models, enrollment_meta, tests = [], [], []
    for speaker, gender in zip(speakers, genders):
        for phrase in phrases:
            language = phrase_language(phrase)
            enrolled = tuple(next(enr_ids) for _ in range(TD_ENROLLMENT_COUNT))
            models.append(EnrollmentRecordTD(f"model_{len(models):05d}", phrase, enrolled))
            enrollment_meta.extend(UtteranceMeta(u, speaker, phrase, language, gender) for u in enrolled)
            tests.extend(UtteranceMeta(next(evl_ids), speaker, phrase, language, gender)
                         for _ in range(n_tests_each))

    train = []
    trn_ids = iter(_ids("trn", spec.n_speakers * len(phrases) * spec.utterances_per_speaker, rng))
    for i in range(spec.n_speakers):
        train_speaker = f"spk_{spec.n_speakers + i + 1:06d}"
        for phrase in phrases:
            train.extend(TrainLabelTD(next(trn_ids), train_speaker, phrase)
                         for _ in range(spec.utterances_per_speaker))
    return models, enrollment_meta, tests, train

def _build_ti(spec: SynthSpec, rng: np.random.Generator):
    speakers = [f"spk_{i + 1:06d}" for i in range(spec.n_speakers)]
    genders = _speaker_genders(spec.n_speakers, spec.gender_split, rng)

    n_enroll = max(1, spec.utterances_per_speaker // 2)
    n_tests_each = spec.utterances_per_speaker - n_enroll
    enr_ids = iter(_ids("enr", spec.n_speakers * n_enroll, rng))
    evl_ids = iter(_ids("evl", spec.n_speakers * n_tests_each, rng))

    models, enrollment_meta, tests = [], [], []
    for speaker, gender in zip(speakers, genders):
        enrolled = tuple(next(enr_ids) for _ in range(n_enroll))
        models.append(EnrollmentRecordTI(f"model_{len(models):05d}", enrolled))
        enrollment_meta.extend(UtteranceMeta(u, speaker, None, Language.FA, gender) for u in enrolled)
        for _ in range(n_tests_each):
            language = Language.EN if rng.random() < spec.language_mix else Language.FA
            tests.append(UtteranceMeta(next(evl_ids), speaker, None, language, gender))

    trn_ids = iter(_ids("trn", spec.n_speakers * spec.utterances_per_speaker, rng))
    train = [TrainLabelTI(next(trn_ids), f"spk_{spec.n_speakers + i + 1:06d}")
             for i in range(spec.n_speakers) for _ in range(spec.utterances_per_speaker)]
    return models, enrollment_meta, tests, train

def _deterministic_zip(entries: dict[str, bytes]) -> bytes:
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, 'w', compression=zipfile.ZIP_DEFLATED) as archive:
        for name, content in entries.items():
            info = zipfile.ZipInfo(name, date_time=_ZIP_TIMESTAMP)
            info.compress_type = zipfile.ZIP_DEFLATED
            info.external_attr = 0o644 << 16
            archive.writestr(info, content)
    return buffer.getvalue()

def synth_corpus(spec: SynthSpec, task: TaskType | int | str,
                 with_submission: bool = False) -> SynthBundle:
    """
    Generates a complete synthetic corpus for one task.

    The bundle holds the participant files under ``docs/``, the ground-truth
    sidecar and key, and a manifest with the seed, spec, PRNG and file hashes.
    With ``with_submission`` it also holds an ``answer.txt`` drawn from the score
    model, a ``metadata`` file and a ready ``submission.zip``.

    :param spec: Corpus parameters.
    :type spec: :py:class:`SynthSpec`
    :param task: The task.
    :type task: :py:class:`~src.python.utils.constants.TaskType`
    :param with_submission: Also emit a synthetic submission.
    :type with_submission: bool

    :rtype: :py:class:`SynthBundle`
    :raises SynthError: ``InfeasibleSpec`` when the corpus cannot be built.
    """
    task = TaskType.parse(task)
    spec.check(task)
    rng = _rng(spec.seed, CORPUS_STREAM)

    if task is TaskType.TEXT_DEPENDENT:
        models, enrollment_meta, tests, train = _build_td(spec, rng)
    else:
        models, enrollment_meta, tests, train = _build_ti(spec, rng)

    policy = GenerationPolicy(seed=spec.seed, caps={TrialType[name]: cap for name, cap in spec.caps.items()})
    pairs = generate_trials(models, tests, task, policy, enrollment_meta)
    trials = [trial for trial, _ in pairs]
    keys = [key for _, key in pairs]
    meta = sorted(enrollment_meta + tests, key=lambda m: m.utterance_id)

    files: dict[str, bytes] = {
        f"docs/{FileNames.ENROLLMENT}": write_enrollment(models, task).encode('utf-8'),
        f"docs/{FileNames.TRIALS}": write_trials(trials).encode('utf-8'),
        f"docs/{FileNames.TRAIN_LABELS}": write_train_labels(train, task).encode('utf-8'),
        FileNames.UTTERANCE_META: write_utterance_meta(meta).encode('utf-8'),
        FileNames.KEY: write_key(keys).encode('utf-8'),
    }

    if with_submission:
        answer = write_answer(synth_scores(keys, spec.score_model, spec.seed)).encode('utf-8')
        metadata = write_metadata(SubmissionMetadata(
            public_description=f"Synthetic Gaussian scores (seed {spec.seed}).",
            fused_systems_count=1,
        )).encode('utf-8')
        files[FileNames.ANSWER] = answer
        files[FileNames.METADATA] = metadata
        files[SUBMISSION_ZIP] = _deterministic_zip({FileNames.ANSWER: answer, FileNames.METADATA: metadata})

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "generator": f"evalkit {__version__}",
        "task": int(task),
        "seed": spec.seed,
        "prng": PRNG_NAME,
        "streams": {"corpus": [spec.seed, CORPUS_STREAM], "scores": [spec.seed, SCORE_STREAM],
                    "sampling": [spec.seed, 2, "trial-type index"]},
        "spec": asdict(spec),
        "files": {path: hashlib.sha256(content).hexdigest() for path, content in sorted(files.items())},
    }
    files[FileNames.MANIFEST] = (json.dumps(manifest, indent=2, sort_keys=True) + '\n').encode('utf-8')

    logger.info(f"Synthesized Task {int(task)} corpus: {len(models)} models, {len(trials)} trials, "
                f"{sum(k.is_target for k in keys)} targets (seed {spec.seed}).")
    return SynthBundle(task, spec, tuple(models), tuple(trials), tuple(keys), tuple(meta), files)

def write_bundle(bundle: SynthBundle, out_dir: str) -> list[str]:
    """
    Writes every bundle file under ``out_dir`` atomically.

    :param bundle: The generated bundle.
    :type bundle: :py:class:`SynthBundle`
    :param out_dir: Destination directory, created if needed.
    :type out_dir: str

    :returns: The written paths.
    :rtype: list[str]
    """
    written = []
    for relative, content in sorted(bundle.files.items()):
        path = os.path.join(out_dir, *relative.split('/'))
        atomic_write_bytes(path, content)
        written.append(path)
    logger.info(f"Wrote {len(written)} bundle files to {out_dir}")
    return written
