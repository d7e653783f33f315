# tests/services/test_trial_keying.py

import itertools

import pytest

from src.python.services.synth_generator import SynthSpec, synth_corpus
from src.python.services.trial_keying import (
    GenerationPolicy, build_key, classify_trial, generate_trials, profile_models, training_overlap
)
from src.python.utils.constants import (
    ErrorCode, Gender, Language, Partition, TaskType, TrialType, phrase_language
)
from src.python.utils.exceptions import TrialSemanticsError
from src.python.utils.types import (
    EnrollmentRecordTD, EnrollmentRecordTI, TrainLabelTI, Trial, UtteranceMeta
)

M, F = Gender.MALE, Gender.FEMALE
FA, EN = Language.FA, Language.EN

@pytest.fixture
def td_setup():
    """Speaker A enrolled on phrase 07, with tests covering the four trial types."""
    models = [EnrollmentRecordTD("model_A07", "07", ("enr_1", "enr_2", "enr_3"))]
    meta = [
        UtteranceMeta("enr_1", "spk_A", "07", EN, M),
        UtteranceMeta("enr_2", "spk_A", "07", EN, M),
        UtteranceMeta("enr_3", "spk_A", "07", EN, M),
        UtteranceMeta("evl_tc", "spk_A", "07", EN, M),
        UtteranceMeta("evl_tw", "spk_A", "09", EN, M),
        UtteranceMeta("evl_ic", "spk_B", "07", EN, M),
        UtteranceMeta("evl_iw", "spk_B", "06", EN, M),
    ]
    return models, meta

# --- classify_trial ---

def test_classify_documented_cases():
    """Speaker and phrase equality select the trial type."""
    assert classify_trial("spk_A", "07", "spk_A", "07") is TrialType.TC
    assert classify_trial("spk_A", "07", "spk_A", "03") is TrialType.TW
    assert classify_trial("spk_A", "07", "spk_B", "07") is TrialType.IC
    assert classify_trial("spk_A", "07", "spk_B", "03") is TrialType.IW

def test_classification_is_a_partition():
    """Every speaker/phrase equality combination maps to exactly one type, and only TC is a target."""
    outcomes = {}
    for same_speaker, same_phrase in itertools.product([True, False], repeat=2):
        trial_type = classify_trial("a", "01", "a" if same_speaker else "b", "01" if same_phrase else "02")
        outcomes[(same_speaker, same_phrase)] = trial_type

    assert len(set(outcomes.values())) == 4
    assert [t for t in outcomes.values() if t.is_target] == [TrialType.TC]

# --- build_key ---

def test_build_td_key(td_setup):
    """Task 1 keys follow the trial order and mark only TC as target."""
    models, meta = td_setup
    trials = [Trial("model_A07", t) for t in ("evl_iw", "evl_tc", "evl_ic", "evl_tw")]
    keys = build_key(trials, models, meta, TaskType.TEXT_DEPENDENT)

    assert [k.trial_type for k in keys] == [TrialType.IW, TrialType.TC, TrialType.IC, TrialType.TW]
    assert [k.is_target for k in keys] == [False, True, False, False]
    assert all(k.partition is Partition.NONE for k in keys)
    assert [k.test_id for k in keys] == [t.test_id for t in trials]

def test_build_ti_key_cross_language():
    """A same-speaker Task 2 trial with an English test is a cross-language target."""
    models = [EnrollmentRecordTI("model_X", ("enr_1", "enr_2"))]
    meta = {
        "enr_1": UtteranceMeta("enr_1", "spk_X", None, FA, F),
        "enr_2": UtteranceMeta("enr_2", "spk_X", None, FA, F),
        "evl_1": UtteranceMeta("evl_1", "spk_X", None, EN, F),
        "evl_2": UtteranceMeta("evl_2", "spk_Y", None, FA, F),
    }
    keys = build_key([Trial("model_X", "evl_1"), Trial("model_X", "evl_2")], models, meta, TaskType.TEXT_INDEPENDENT)

    assert (keys[0].trial_type, keys[0].is_target, keys[0].partition) == (TrialType.TRG, True, Partition.CROSS_LANG)
    assert (keys[1].trial_type, keys[1].is_target, keys[1].partition) == (TrialType.NON, False, Partition.SAME_LANG)

def test_unknown_model_and_test(td_setup):
    """Trials that reference absent models or utterances are refused."""
    models, meta = td_setup
    with pytest.raises(TrialSemanticsError) as excinfo:
        build_key([Trial("model_ZZ", "evl_tc")], models, meta, 1)
    assert excinfo.value.code is ErrorCode.UNKNOWN_MODEL_ID

    with pytest.raises(TrialSemanticsError) as excinfo:
        build_key([Trial("model_A07", "evl_missing")], models, meta, 1)
    assert excinfo.value.code is ErrorCode.UNKNOWN_TEST_ID

def test_missing_phrase_for_td(td_setup):
    """A Task 1 test utterance without a phrase cannot be typed."""
    models, meta = td_setup
    meta = meta + [UtteranceMeta("evl_nophrase", "spk_A", None, EN, M)]
    with pytest.raises(TrialSemanticsError) as excinfo:
        build_key([Trial("model_A07", "evl_nophrase")], models, meta, 1)
    assert excinfo.value.code is ErrorCode.MISSING_PHRASE

def test_unknown_enrollment_utterance():
    """Enrollment utterances need ground truth too."""
    models = [EnrollmentRecordTI("model_X", ("enr_unknown",))]
    with pytest.raises(TrialSemanticsError) as excinfo:
        profile_models(models, {})
    assert excinfo.value.code is ErrorCode.UNKNOWN_ENROLLMENT_ID

# --- generate_trials ---

def test_cross_gender_pairs_are_excluded():
    """One male model against a same-speaker male test and an other-speaker female test yields only the TC."""
    models = [EnrollmentRecordTD("model_A07", "07", ("enr_1", "enr_2", "enr_3"))]
    enrollment_meta = [UtteranceMeta(u, "spk_A", "07", EN, M) for u in ("enr_1", "enr_2", "enr_3")]
    tests = [UtteranceMeta("evl_1", "spk_A", "07", EN, M), UtteranceMeta("evl_2", "spk_B", "07", EN, F)]

    pairs = generate_trials(models, tests, TaskType.TEXT_DEPENDENT, GenerationPolicy(), enrollment_meta)

    assert len(pairs) == 1
    trial, key = pairs[0]
    assert trial == Trial("model_A07", "evl_1")
    assert key.trial_type is TrialType.TC

def test_uncapped_generation_is_the_full_cross():
    """Two models and four eligible tests give eight trials."""
    models = [EnrollmentRecordTI("model_1", ("enr_1",)), EnrollmentRecordTI("model_2", ("enr_2",))]
    enrollment_meta = [UtteranceMeta("enr_1", "spk_1", None, FA, M), UtteranceMeta("enr_2", "spk_2", None, FA, M)]
    tests = [UtteranceMeta(f"evl_{i}", f"spk_{i % 2 + 1}", None, EN if i % 2 else FA, M) for i in range(4)]

    pairs = generate_trials(models, tests, TaskType.TEXT_INDEPENDENT, GenerationPolicy(), enrollment_meta)
    assert len(pairs) == 8

def test_own_enrollment_is_never_a_test(td_setup):
    """A model is never paired with one of its own enrollment utterances."""
    models, meta = td_setup
    tests = meta  # enrollment utterances offered as tests too
    pairs = generate_trials(models, tests, TaskType.TEXT_DEPENDENT, GenerationPolicy(), meta)

    assert {t.test_id for t, _ in pairs}.isdisjoint({"enr_1", "enr_2", "enr_3"})

def test_td_language_constraint():
    """Task 1 tests must be spoken in the language of the model's phrase."""
    models = [EnrollmentRecordTD("model_fa", "01", ("enr_1", "enr_2", "enr_3"))]
    enrollment_meta = [UtteranceMeta(u, "spk_A", "01", FA, M) for u in ("enr_1", "enr_2", "enr_3")]
    tests = [UtteranceMeta("evl_fa", "spk_B", "02", FA, M), UtteranceMeta("evl_en", "spk_B", "06", EN, M)]

    pairs = generate_trials(models, tests, TaskType.TEXT_DEPENDENT, GenerationPolicy(), enrollment_meta)
    assert [t.test_id for t, _ in pairs] == ["evl_fa"]

def test_missing_gender():
    """Generation needs gender for every utterance."""
    models = [EnrollmentRecordTI("model_1", ("enr_1",))]
    enrollment_meta = [UtteranceMeta("enr_1", "spk_1", None, FA, M)]
    tests = [UtteranceMeta("evl_1", "spk_2", None, FA, None)]
    with pytest.raises(TrialSemanticsError) as excinfo:
        generate_trials(models, tests, 2, GenerationPolicy(), enrollment_meta)
    assert excinfo.value.code is ErrorCode.MISSING_GENDER

def test_empty_result():
    """No eligible pair is an error rather than an empty list."""
    models = [EnrollmentRecordTI("model_1", ("enr_1",))]
    enrollment_meta = [UtteranceMeta("enr_1", "spk_1", None, FA, M)]
    tests = [UtteranceMeta("evl_1", "spk_2", None, FA, F)]
    with pytest.raises(TrialSemanticsError) as excinfo:
        generate_trials(models, tests, 2, GenerationPolicy(), enrollment_meta)
    assert excinfo.value.code is ErrorCode.EMPTY_RESULT

def test_capped_generation_is_deterministic():
    """Fixed seed and caps give the identical trial list on every run, within the caps."""
    caps = {"TC": 1, "TW": 1, "IC": 1, "IW": 1}
    first = synth_corpus(SynthSpec(seed=11, n_speakers=10, caps=caps), TaskType.TEXT_DEPENDENT)
    second = synth_corpus(SynthSpec(seed=11, n_speakers=10, caps=caps), TaskType.TEXT_DEPENDENT)

    assert first.files["docs/trials.txt"] == second.files["docs/trials.txt"]
    counts = {t: sum(k.trial_type is t for k in first.keys) for t in TrialType}
    assert all(counts[TrialType[name]] <= 1 for name in caps)

def test_generated_constraints_hold():
    """Generated corpora contain no cross-gender pair and, for Task 1, no cross-language pair."""
    bundle = synth_corpus(SynthSpec(seed=3, n_speakers=8, n_phrases=10), TaskType.TEXT_DEPENDENT)
    meta = {m.utterance_id: m for m in bundle.meta}
    phrase_of = {m.model_id: m.phrase_id for m in bundle.models}
    gender_of = {m.model_id: meta[m.enrollment_ids[0]].gender for m in bundle.models}

    for trial, key in zip(bundle.trials, bundle.keys):
        test = meta[trial.test_id]
        assert test.gender == gender_of[trial.model_id]
        assert test.language == phrase_language(phrase_of[trial.model_id])
        assert key.is_target == (key.trial_type is TrialType.TC)

def test_training_overlap():
    """Speakers shared by training labels and evaluation data are reported."""
    labels = [TrainLabelTI("trn_1", "spk_1"), TrainLabelTI("trn_2", "spk_9")]
    assert training_overlap(labels, {"spk_1", "spk_2"}) == {"spk_1"}
    assert training_overlap(labels, set()) == set()
