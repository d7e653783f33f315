# src/python/formats/utterance_meta.py

from .line_reader import read_table, render_table
from ..utils.constants import ErrorCode, FileNames, Gender, Headers, Language, PHRASES
from ..utils.exceptions import FormatError
from ..utils.logger import get_logger
from ..utils.types import UtteranceMeta

logger = get_logger(__name__)

ABSENT = "-"

def parse_utterance_meta(content: str, warnings: list[str] | None = None) -> list[UtteranceMeta]:
    """
    Parses the ground-truth sidecar (one row per utterance). ``-`` marks an absent
    phrase (text-independent utterance) or an unknown gender.

    :param content: The file content.
    :type content: str
    :param warnings: Optional collector for nonfatal notes.
    :type warnings: list[str] or None

    :returns: The rows in file order.
    :rtype: list[:py:class:`~src.python.utils.types.UtteranceMeta`]
    :raises FormatError: ``MalformedLine``, ``InvalidPhraseId`` or ``DuplicateFileId``.
    """
    rows: list[UtteranceMeta] = []
    seen: set[str] = set()

    for row in read_table(content, Headers.UTTERANCE_META, FileNames.UTTERANCE_META, warnings):
        if len(row.fields) != 5:
            raise FormatError(ErrorCode.MALFORMED_LINE, f"Expected 5 columns, found {len(row.fields)}",
                              line_no=row.line_no, source=FileNames.UTTERANCE_META)
        utt_id, speaker_id, phrase_text, language_text, gender_text = row.fields

        if utt_id in seen:
            raise FormatError(ErrorCode.DUPLICATE_FILE_ID, f"Utterance {utt_id!r} appears twice",
                              line_no=row.line_no, source=FileNames.UTTERANCE_META)
        seen.add(utt_id)

        if phrase_text != ABSENT and phrase_text not in PHRASES:
            raise FormatError(ErrorCode.INVALID_PHRASE_ID, f"Phrase id {phrase_text!r} is not one of 01..10",
                              line_no=row.line_no, source=FileNames.UTTERANCE_META)
        try:
            language = Language(language_text)
            gender = None if gender_text == ABSENT else Gender(gender_text)
        except ValueError as e:
            raise FormatError(ErrorCode.MALFORMED_LINE,
                              f"Bad language {language_text!r} or gender {gender_text!r}",
                              line_no=row.line_no, source=FileNames.UTTERANCE_META) from e

        rows.append(UtteranceMeta(utt_id, speaker_id, None if phrase_text == ABSENT else phrase_text,
                                  language, gender))

    logger.info(f"Parsed {len(rows)} utterance metadata rows.")
    return rows

def write_utterance_meta(rows: list[UtteranceMeta]) -> str:
    """
    Renders sidecar rows as tab-separated text.

    :param rows: The metadata rows.
    :type rows: list[:py:class:`~src.python.utils.types.UtteranceMeta`]

    :returns: The file content.
    :rtype: str
    """
    return render_table(Headers.UTTERANCE_META, [
        (m.utterance_id, m.speaker_id, m.phrase_id or ABSENT, m.language.value,
         m.gender.value if m.gender else ABSENT)
        for m in rows
    ], separator='\t')

def index_utterance_meta(rows: list[UtteranceMeta]) -> dict[str, UtteranceMeta]:
    """
    Maps utterance id to its row.

    :param rows: The metadata rows.
    :type rows: list[:py:class:`~src.python.utils.types.UtteranceMeta`]

    :rtype: dict[str, UtteranceMeta]
    """
    return {m.utterance_id: m for m in rows}
