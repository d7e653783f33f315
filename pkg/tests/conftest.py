# tests/conftest.py

import io
import zipfile

import pytest

from src.python.formats.metadata import write_metadata
from src.python.formats.trial_key import write_key
from src.python.utils.constants import Partition, TrialType
from src.python.utils.types import SubmissionMetadata, Trial, TrialKey

BASELINE_METADATA = (
    "public-description: This is a submission by the challenge organizers. "
    "An x-vector system trained on VoxCeleb1 and VoxCeleb2.\n"
    "fused-systems-count: 1\n"
)

def make_zip(entries: dict[str, bytes | str | None], compression: int = zipfile.ZIP_DEFLATED) -> bytes:
    """
    Builds an in-memory archive. A name ending in ``/`` (or a None value) is
    written as a directory entry.
    """
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, 'w', compression=compression) as archive:
        for name, content in entries.items():
            if content is None or name.endswith('/'):
                archive.writestr(zipfile.ZipInfo(name if name.endswith('/') else name + '/'), b"")
            else:
                archive.writestr(name, content)
    return buffer.getvalue()

def td_key(model_id: str, test_id: str, trial_type: TrialType) -> TrialKey:
    return TrialKey(model_id, test_id, trial_type, trial_type.is_target, Partition.NONE)

@pytest.fixture
def worked_example() -> tuple[list[float], list[bool]]:
    """
    Three targets (0.8, 0.6, 0.4) and three nontargets (0.7, 0.1, -0.2).
    minDCF is 2/3 and EER is 1/3 under the default costs.
    """
    scores = [0.8, 0.6, 0.4, 0.7, 0.1, -0.2]
    flags = [True, True, True, False, False, False]
    return scores, flags

@pytest.fixture
def worked_keys() -> list[TrialKey]:
    """The worked example as Task 1 key rows: TC targets, one TW, one IC, one IW."""
    return [
        td_key("model_00000", "evl_000001", TrialType.TC),
        td_key("model_00000", "evl_000002", TrialType.TC),
        td_key("model_00001", "evl_000003", TrialType.TC),
        td_key("model_00000", "evl_000004", TrialType.TW),
        td_key("model_00001", "evl_000005", TrialType.IC),
        td_key("model_00001", "evl_000006", TrialType.IW),
    ]

@pytest.fixture
def worked_trials(worked_keys) -> list[Trial]:
    return [Trial(k.model_id, k.test_id) for k in worked_keys]

@pytest.fixture
def worked_answer() -> str:
    return "0.8\n0.6\n0.4\n0.7\n0.1\n-0.2\n"

@pytest.fixture
def good_archive(worked_answer) -> bytes:
    """A valid submission for the six worked-example trials."""
    return make_zip({"answer.txt": worked_answer, "metadata": BASELINE_METADATA})

@pytest.fixture
def three_trials() -> list[Trial]:
    return [Trial("model_00000", "evl_000018"), Trial("model_00000", "evl_000019"),
            Trial("model_00001", "evl_000020")]

@pytest.fixture
def worked_files(tmp_path, worked_keys, worked_answer) -> dict[str, str]:
    """Key, answer and trials files of the worked example on disk."""
    key_path = tmp_path / "trial_key.tsv"
    key_path.write_text(write_key(worked_keys), encoding='utf-8')
    answer_path = tmp_path / "answer.txt"
    answer_path.write_text(worked_answer, encoding='utf-8')
    trials_path = tmp_path / "trials.txt"
    trials_path.write_text("model-id evaluation-file-id\n"
                           + "".join(f"{k.model_id} {k.test_id}\n" for k in worked_keys), encoding='utf-8')
    zip_path = tmp_path / "submission.zip"
    zip_path.write_bytes(make_zip({"answer.txt": worked_answer,
                                   "metadata": write_metadata(SubmissionMetadata("Worked example", 1))}))
    return {"key": str(key_path), "answer": str(answer_path), "trials": str(trials_path), "zip": str(zip_path)}

@pytest.fixture
def service_settings(tmp_path) -> dict:
    """Loaded-settings shape for a service writing under a temporary data directory."""
    return {
        "debug_mode": False,
        "data_dir": str(tmp_path / "data"),
        "daily_quota": 10,
        "freeze_at": None,
        "key_task1": None,
        "key_task2": None,
        "bind": ("127.0.0.1", 0),
        "rejected_consume_quota": True,
        "sync_scoring_max_trials": 200000,
        "scoring_workers": 2,
        "leaderboard_decimals": 4,
        "max_archive_bytes": 268435456,
        "teams": {"team_a": "token-a", "team_b": "token-b", "team_c": "token-c"},
    }

@pytest.fixture
def clean_journal(tmp_path):
    """A JournalConnector on a temporary data directory that has not been opened yet."""
    from src.python.journal_connector import JournalConnector
    return JournalConnector(str(tmp_path / "data"))

@pytest.fixture
def open_journal(clean_journal):
    """
    An opened journal, closed after the test.
    """
    # 1. Connect
    assert clean_journal.connect() is True

    # 2. Yield the connected object to the test function
    yield clean_journal

    # 3. Teardown
    clean_journal.close()
