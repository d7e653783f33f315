# src/python/services/trial_keying.py

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from ..utils.constants import (
    ErrorCode, Gender, Language, Partition, TaskType, TrialType, phrase_language
)
from ..utils.exceptions import TrialSemanticsError
from ..utils.logger import get_logger
from ..utils.types import (
    EnrollmentRecord, EnrollmentRecordTD, TrainLabel, Trial, TrialKey, UtteranceMeta
)

logger = get_logger(__name__)

_SAMPLING_STREAM = 2

def classify_trial(model_speaker: str, model_phrase: str,
                   test_speaker: str, test_phrase: str) -> TrialType:
    """
    Text-dependent trial type from speaker and phrase equality.

    :param model_speaker: Speaker who enrolled the model.
    :type model_speaker: str
    :param model_phrase: Phrase the model was enrolled with.
    :type model_phrase: str
    :param test_speaker: Speaker of the test utterance.
    :type test_speaker: str
    :param test_phrase: Phrase spoken in the test utterance.
    :type test_phrase: str

    :returns: TC, TW, IC or IW.
    :rtype: :py:class:`~src.python.utils.constants.TrialType`
    """
    same_speaker = model_speaker == test_speaker
    same_phrase = model_phrase == test_phrase
    if same_speaker:
        return TrialType.TC if same_phrase else TrialType.TW
    return TrialType.IC if same_phrase else TrialType.IW

@dataclass(frozen=True)
class ModelProfile:
    """What the ground truth says about an enrolled model."""
    model_id: str
    speaker_id: str
    language: Language
    gender: Gender | None
    phrase_id: str | None
    enrollment_ids: frozenset[str]

@dataclass(frozen=True)
class GenerationPolicy:
    """
    Trial generation settings. ``caps`` bounds the number of trials kept per
    trial type; types without a cap are kept exhaustively.
    """
    seed: int = 0
    caps: Mapping[TrialType, int] = field(default_factory=dict)

def _index(meta: Mapping[str, UtteranceMeta] | Iterable[UtteranceMeta]) -> Mapping[str, UtteranceMeta]:
    if isinstance(meta, Mapping):
        return meta
    return {m.utterance_id: m for m in meta}

def profile_models(models: list[EnrollmentRecord], meta: Mapping[str, UtteranceMeta]
                   ) -> dict[str, ModelProfile]:
    """
    Resolves each model's speaker, language and gender from the metadata of its
    enrollment utterances (the first utterance decides).

    :param models: Enrollment records.
    :type models: list[EnrollmentRecord]
    :param meta: Ground-truth table indexed by utterance id.
    :type meta: Mapping[str, UtteranceMeta]

    :rtype: dict[str, ModelProfile]
    :raises TrialSemanticsError: ``UnknownEnrollmentId`` when an enrollment
        utterance has no metadata.
    """
    profiles = {}
    for record in models:
        rows = []
        for utt_id in record.enrollment_ids:
            if utt_id not in meta:
                raise TrialSemanticsError(ErrorCode.UNKNOWN_ENROLLMENT_ID,
                                          f"Enrollment utterance {utt_id!r} of model "
                                          f"{record.model_id!r} has no metadata")
            rows.append(meta[utt_id])

        speakers = {row.speaker_id for row in rows}
        if len(speakers) > 1:
            logger.warning(f"Model {record.model_id} is enrolled from several speakers "
                           f"{sorted(speakers)}; using {rows[0].speaker_id}")

        profiles[record.model_id] = ModelProfile(
            model_id=record.model_id,
            speaker_id=rows[0].speaker_id,
            language=rows[0].language,
            gender=rows[0].gender,
            phrase_id=record.phrase_id if isinstance(record, EnrollmentRecordTD) else None,
            enrollment_ids=frozenset(record.enrollment_ids),
        )
    return profiles

def _key_for(profile: ModelProfile, test: UtteranceMeta, task: TaskType) -> TrialKey:
    if task is TaskType.TEXT_DEPENDENT:
        if profile.phrase_id is None:
            raise TrialSemanticsError(ErrorCode.MISSING_PHRASE,
                                      f"Model {profile.model_id!r} has no phrase id")
        if test.phrase_id is None:
            raise TrialSemanticsError(ErrorCode.MISSING_PHRASE,
                                      f"Test utterance {test.utterance_id!r} has no phrase id")
        trial_type = classify_trial(profile.speaker_id, profile.phrase_id,
                                    test.speaker_id, test.phrase_id)
        return TrialKey(profile.model_id, test.utterance_id, trial_type, trial_type.is_target)

    trial_type = TrialType.TRG if profile.speaker_id == test.speaker_id else TrialType.NON
    partition = Partition.SAME_LANG if profile.language == test.language else Partition.CROSS_LANG
    return TrialKey(profile.model_id, test.utterance_id, trial_type, trial_type.is_target, partition)

def build_key(trials: list[Trial], models: list[EnrollmentRecord],
              meta: Mapping[str, UtteranceMeta] | Iterable[UtteranceMeta],
              task: TaskType | int | str) -> list[TrialKey]:
    """
    Derives the ground-truth key of an existing trial list.

    Task 1 trials are typed TC/TW/IC/IW and only TC is a target. Task 2 trials
    are TRG/NON and partitioned by comparing enrollment and test language.

    :param trials: The official trial list.
    :type trials: list[:py:class:`~src.python.utils.types.Trial`]
    :param models: Enrollment records of the same task.
    :type models: list[EnrollmentRecord]
    :param meta: Ground-truth sidecar rows (or an index of them).
    :type meta: Mapping[str, UtteranceMeta] or Iterable[UtteranceMeta]
    :param task: The task.
    :type task: :py:class:`~src.python.utils.constants.TaskType`

    :returns: One key row per trial, same order.
    :rtype: list[:py:class:`~src.python.utils.types.TrialKey`]
    :raises TrialSemanticsError: ``UnknownModelId``, ``UnknownTestId``,
        ``UnknownEnrollmentId`` or ``MissingPhrase``.
    """
    task = TaskType.parse(task)
    meta = _index(meta)
    profiles = profile_models(models, meta)

    keys = []
    for position, trial in enumerate(trials):
        profile = profiles.get(trial.model_id)
        if profile is None:
            raise TrialSemanticsError(ErrorCode.UNKNOWN_MODEL_ID,
                                      f"Trial {position + 1} references unknown model {trial.model_id!r}")
        test = meta.get(trial.test_id)
        if test is None:
            raise TrialSemanticsError(ErrorCode.UNKNOWN_TEST_ID,
                                      f"Trial {position + 1} references unknown utterance {trial.test_id!r}")
        keys.append(_key_for(profile, test, task))

    logger.info(f"Built {task.short_name} key for {len(keys)} trials "
                f"({sum(k.is_target for k in keys)} targets).")
    return keys

def _reservoir(candidates: list[int], cap: int, rng: np.random.Generator) -> list[int]:
    """Seeded reservoir sample of ``cap`` candidates, returned in candidate order."""
    if cap >= len(candidates):
        return candidates
    reservoir = list(range(cap))
    for i in range(cap, len(candidates)):
        j = int(rng.integers(0, i + 1))
        if j < cap:
            reservoir[j] = i
    return [candidates[i] for i in sorted(reservoir)]

def generate_trials(models: list[EnrollmentRecord], tests: list[UtteranceMeta],
                    task: TaskType | int | str, policy: GenerationPolicy,
                    enrollment_meta: Mapping[str, UtteranceMeta] | Iterable[UtteranceMeta]
                    ) -> list[tuple[Trial, TrialKey]]:
    """
    Generates a trial list with its key from models and candidate test utterances.

    Pairs are the models x tests cross in input order, minus cross-gender pairs,
    minus pairs of a model with its own enrollment utterances, and for Task 1
    minus pairs whose test language differs from the model phrase's language.
    Each trial type is then down-sampled to its cap with a seeded reservoir,
    keeping the original order.

    :param models: Enrollment records.
    :type models: list[EnrollmentRecord]
    :param tests: Candidate test utterances with full metadata.
    :type tests: list[:py:class:`~src.python.utils.types.UtteranceMeta`]
    :param task: The task.
    :type task: :py:class:`~src.python.utils.constants.TaskType`
    :param policy: Seed and per-type caps.
    :type policy: :py:class:`GenerationPolicy`
    :param enrollment_meta: Metadata of the enrollment utterances.
    :type enrollment_meta: Mapping[str, UtteranceMeta] or Iterable[UtteranceMeta]

    :returns: The trials with their key rows.
    :rtype: list[tuple[Trial, TrialKey]]
    :raises TrialSemanticsError: ``MissingGender``, ``MissingPhrase``,
        ``UnknownEnrollmentId`` or ``EmptyResult``.
    """
    task = TaskType.parse(task)
    profiles = profile_models(models, _index(enrollment_meta))

    for profile in profiles.values():
        if profile.gender is None:
            raise TrialSemanticsError(ErrorCode.MISSING_GENDER,
                                      f"Model {profile.model_id!r} has no gender in its metadata")
    for test in tests:
        if test.gender is None:
            raise TrialSemanticsError(ErrorCode.MISSING_GENDER,
                                      f"Test utterance {test.utterance_id!r} has no gender")

    candidates: list[TrialKey] = []
    for record in models:
        profile = profiles[record.model_id]
        required_language = (phrase_language(profile.phrase_id)
                             if task is TaskType.TEXT_DEPENDENT and profile.phrase_id else None)
        for test in tests:
            if test.gender != profile.gender or test.utterance_id in profile.enrollment_ids:
                continue
            if required_language is not None and test.language != required_language:
                continue
            candidates.append(_key_for(profile, test, task))

    by_type: dict[TrialType, list[int]] = {}
    for index, key in enumerate(candidates):
        by_type.setdefault(key.trial_type, []).append(index)

    kept: list[int] = []
    for type_index, trial_type in enumerate(TrialType):
        indices = by_type.get(trial_type, [])
        cap = policy.caps.get(trial_type)
        if cap is not None:
            rng = np.random.default_rng([policy.seed, _SAMPLING_STREAM, type_index])
            indices = _reservoir(indices, cap, rng)
        kept.extend(indices)
    kept.sort()

    if not kept:
        raise TrialSemanticsError(ErrorCode.EMPTY_RESULT, "No trial satisfies the generation constraints")

    logger.info(f"Generated {len(kept)} of {len(candidates)} eligible {task.short_name} trials.")
    return [(Trial(candidates[i].model_id, candidates[i].test_id), candidates[i]) for i in kept]

def training_overlap(train_labels: list[TrainLabel], trial_speakers: Iterable[str]) -> set[str]:
    """
    Speakers that appear both in the training labels and among evaluation
    speakers. In-domain training and evaluation speakers are meant to be disjoint.

    :param train_labels: Parsed ``train_labels.txt``.
    :type train_labels: list[TrainLabel]
    :param trial_speakers: Speaker ids of evaluation models and test utterances.
    :type trial_speakers: Iterable[str]

    :rtype: set[str]
    """
    overlap = {label.speaker_id for label in train_labels} & set(trial_speakers)
    if overlap:
        logger.warning(f"{len(overlap)} evaluation speaker(s) also appear in the training labels")
    return overlap
