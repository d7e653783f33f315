# src/python/cli.py

import argparse
import json
import sys
from typing import Any, Sequence, TextIO

from .formats.enrollment import parse_enrollment
from .formats.answer import parse_answer
from .formats.train_labels import parse_train_labels
from .formats.trial_key import parse_key, write_key
from .formats.trials import parse_trials
from .formats.utterance_meta import index_utterance_meta, parse_utterance_meta
from .services.audio_audit import audit_corpus, audit_to_dict, format_violations
from .services.scorer import SliceSpec, breakdown_report, format_summary, report_to_dict, validate_report
from .services.settings_manager import SettingsManager
from .services.submission_validator import DEFAULT_MAX_UNCOMPRESSED_BYTES, validate_submission
from .services.synth_generator import ScoreModel, SynthSpec, synth_corpus, write_bundle
from .services.trial_keying import build_key, profile_models, training_overlap
from .utils._version import __version__
from .utils.constants import SCHEMA_VERSION, TaskType, TrialType
from .utils.det_metrics import export_det
from .utils.exceptions import ApplicationError
from .utils.file_utils import atomic_write_text, read_text
from .utils.logger import get_logger, setup_logger
from .utils.types import DetCostParams, VadParams

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_USAGE = 2

# --- Argument types ---

def _task(text: str) -> TaskType:
    try:
        return TaskType.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e

def _floats(count: int, build):
    def convert(text: str):
        parts = [p.strip() for p in text.split(',')]
        if len(parts) != count:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {text!r}")
        try:
            return build(*(float(p) for p in parts))
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e)) from e
    return convert

def _slices(text: str) -> list[SliceSpec]:
    try:
        return [SliceSpec.parse(item) for item in text.split(',') if item.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"unknown slice in {text!r}") from e

def _cap(text: str) -> tuple[str, int]:
    name, sep, value = text.partition('=')
    if not sep or name.strip().upper() not in TrialType.__members__:
        raise argparse.ArgumentTypeError(f"expected TYPE=N with TYPE in {', '.join(TrialType.__members__)}")
    try:
        return name.strip().upper(), int(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"cap must be an integer, got {value!r}") from e

def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from e
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a nonnegative 64-bit integer")
    return value

def build_parser() -> argparse.ArgumentParser:
    """
    The ``evalkit`` argument grammar.

    :rtype: :py:class:`argparse.ArgumentParser`
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--json', action='store_true', help="print one schema-versioned JSON line")
    common.add_argument('--debug', action='store_true', help="verbose logging")

    parser = argparse.ArgumentParser(prog='evalkit', description="Evaluation toolkit for the text-dependent "
                                     "and text-independent speaker verification tasks.")
    parser.add_argument('--version', action='version', version=f"evalkit {__version__}")
    sub = parser.add_subparsers(dest='command', required=True, metavar='COMMAND')

    p = sub.add_parser('validate', parents=[common], help="check a submission archive")
    p.add_argument('--task', type=_task, required=True)
    p.add_argument('--trials', required=True, help="official trials.txt")
    p.add_argument('--max-bytes', type=int, default=DEFAULT_MAX_UNCOMPRESSED_BYTES)
    p.add_argument('zip', help="submission archive")

    p = sub.add_parser('score', parents=[common], help="score an answer against a key")
    p.add_argument('--key', required=True)
    p.add_argument('--answer', required=True)
    p.add_argument('--params', type=_floats(3, DetCostParams), default=DetCostParams(),
                   metavar='C_MISS,C_FA,P_TARGET')
    p.add_argument('--slices', type=_slices, default=None, metavar='LIST',
                   help="comma-separated dimension[=label] items")
    p.add_argument('--enrollment', help="Task 1 model_enrollment.txt, needed for phrase and language slices")
    p.add_argument('--report', required=True)
    p.add_argument('--det', help="also write the DET curve as CSV")
    p.add_argument('--jobs', type=int, default=1)

    p = sub.add_parser('keygen', parents=[common], help="derive the ground-truth key of a trial list")
    p.add_argument('--labels', required=True, help="train_labels.txt, checked for speaker overlap")
    p.add_argument('--enrollment', required=True)
    p.add_argument('--trials', required=True)
    p.add_argument('--meta', required=True, help="utterance metadata sidecar")
    p.add_argument('--task', type=_task, required=True)
    p.add_argument('--out', required=True)

    p = sub.add_parser('synth', parents=[common], help="generate a synthetic corpus")
    p.add_argument('--task', type=_task, required=True)
    p.add_argument('--seed', type=_seed, required=True)
    p.add_argument('--speakers', type=int, default=10)
    p.add_argument('--phrases', type=int, default=2)
    p.add_argument('--utterances', type=int, default=5, help="per speaker (and phrase for Task 1)")
    p.add_argument('--gender-split', type=float, default=0.5)
    p.add_argument('--language-mix', type=float, default=0.5)
    p.add_argument('--mu-target', type=float, default=1.0)
    p.add_argument('--mu-nontarget', type=float, default=-1.0)
    p.add_argument('--sigma', type=float, default=1.0)
    p.add_argument('--cap', type=_cap, action='append', default=[], metavar='TYPE=N')
    p.add_argument('--with-submission', action='store_true', help="also emit answer, metadata and submission.zip")
    p.add_argument('--out', required=True)

    p = sub.add_parser('audit', parents=[common], help="check audio durations with an energy VAD")
    p.add_argument('--enrollment', required=True)
    p.add_argument('--wav-dir', required=True)
    p.add_argument('--task', type=_task, required=True)
    p.add_argument('--vad', type=_floats(3, VadParams), default=VadParams(),
                   metavar='FRAME_MS,SHIFT_MS,THRESHOLD_DB')
    p.add_argument('--slack', type=float, default=0.0)
    p.add_argument('--report', help="also write the audit as JSON")
    p.add_argument('--jobs', type=int, default=1)

    p = sub.add_parser('det', parents=[common], help="export the DET curve as CSV")
    p.add_argument('--key', required=True)
    p.add_argument('--answer', required=True)
    p.add_argument('--out', required=True)

    p = sub.add_parser('serve', parents=[common], help="run the leaderboard service")
    p.add_argument('--config', help="settings file (JSON or YAML)")

    return parser

# --- Commands ---

def _emit(out: TextIO, args: argparse.Namespace, doc: dict[str, Any], human: str) -> None:
    if args.json:
        doc.setdefault("schema_version", SCHEMA_VERSION)
        out.write(json.dumps(doc, sort_keys=True) + '\n')
    else:
        out.write(human.rstrip('\n') + '\n')

def cmd_validate(args: argparse.Namespace, out: TextIO) -> int:
    trials = parse_trials(read_text(args.trials))
    try:
        with open(args.zip, 'rb') as f:
            data = f.read()
    except OSError as e:
        raise ApplicationError(f"Cannot read archive '{args.zip}'.", e) from e

    result = validate_submission(data, trials, args.task, args.max_bytes)
    lines = ["OK" if result.ok else f"INVALID ({len(result.errors)} issue(s))"]
    lines += [f"  {i.code.value}: {i.detail}" + (f" [{i.location}]" if i.location else "") for i in result.errors]
    lines += [f"  warning: {w}" for w in result.warnings]
    _emit(out, args, result.to_dict(), '\n'.join(lines))
    return EXIT_OK if result.ok else EXIT_DOMAIN_ERROR

def _load_scores(key_path: str, answer_path: str):
    keys = parse_key(read_text(key_path))
    scores = parse_answer(read_text(answer_path), len(keys))
    return keys, scores

def cmd_score(args: argparse.Namespace, out: TextIO) -> int:
    keys, scores = _load_scores(args.key, args.answer)
    model_phrases = None
    if args.enrollment:
        records = parse_enrollment(read_text(args.enrollment), TaskType.TEXT_DEPENDENT)
        model_phrases = {r.model_id: r.phrase_id for r in records}

    report = breakdown_report(scores, keys, args.params, args.slices, model_phrases, jobs=args.jobs)
    if args.det:
        atomic_write_text(args.det, export_det(report.det_points))
    doc = report_to_dict(report, det_csv_path=args.det)
    validate_report(doc)
    atomic_write_text(args.report, json.dumps(doc, indent=2, sort_keys=True) + '\n')
    logger.info(f"Report written to {args.report}")
    _emit(out, args, doc, format_summary(report))
    return EXIT_OK

def cmd_keygen(args: argparse.Namespace, out: TextIO) -> int:
    warnings: list[str] = []
    models = parse_enrollment(read_text(args.enrollment), args.task, warnings)
    trials = parse_trials(read_text(args.trials), warnings)
    meta = index_utterance_meta(parse_utterance_meta(read_text(args.meta), warnings))
    labels = parse_train_labels(read_text(args.labels), args.task, warnings)

    keys = build_key(trials, models, meta, args.task)
    profiles = profile_models(models, meta)
    evaluation_speakers = {p.speaker_id for p in profiles.values()} | {meta[t.test_id].speaker_id for t in trials}
    overlap = sorted(training_overlap(labels, evaluation_speakers))
    warnings += [f"speaker {s} appears in both training labels and evaluation data" for s in overlap]

    atomic_write_text(args.out, write_key(keys))
    counts = {t.value: sum(k.trial_type is t for k in keys) for t in TrialType if any(k.trial_type is t for k in keys)}
    human = [f"Wrote {len(keys)} key rows to {args.out} ({', '.join(f'{k}={v}' for k, v in counts.items())})"]
    human += [f"  warning: {w}" for w in warnings]
    _emit(out, args, {"task": int(args.task), "n_trials": len(keys), "trial_types": counts,
                      "overlap_speakers": overlap, "warnings": warnings, "out": args.out}, '\n'.join(human))
    return EXIT_OK

def cmd_synth(args: argparse.Namespace, out: TextIO) -> int:
    spec = SynthSpec(
        seed=args.seed,
        n_speakers=args.speakers,
        n_phrases=args.phrases,
        utterances_per_speaker=args.utterances,
        gender_split=args.gender_split,
        language_mix=args.language_mix,
        score_model=ScoreModel(args.mu_target, args.mu_nontarget, args.sigma),
        caps=dict(args.cap),
    )
    bundle = synth_corpus(spec, args.task, with_submission=args.with_submission)
    written = write_bundle(bundle, args.out)
    n_target = sum(k.is_target for k in bundle.keys)
    _emit(out, args, {"task": int(bundle.task), "seed": spec.seed, "n_models": len(bundle.models),
                      "n_trials": len(bundle.trials), "n_target": n_target, "files": written},
          f"Task {int(bundle.task)} corpus (seed {spec.seed}): {len(bundle.models)} models, "
          f"{len(bundle.trials)} trials, {n_target} targets -> {args.out}")
    return EXIT_OK

def cmd_audit(args: argparse.Namespace, out: TextIO) -> int:
    models = parse_enrollment(read_text(args.enrollment), args.task)
    report = audit_corpus(models, args.wav_dir, args.task, args.vad, args.slack, jobs=args.jobs)
    doc = audit_to_dict(report, args.task, args.vad)
    if args.report:
        atomic_write_text(args.report, json.dumps(doc, indent=2, sort_keys=True) + '\n')
    _emit(out, args, doc, format_violations(report))
    return EXIT_DOMAIN_ERROR if report.violations else EXIT_OK

def cmd_det(args: argparse.Namespace, out: TextIO) -> int:
    keys, scores = _load_scores(args.key, args.answer)
    report = breakdown_report(scores, keys)
    atomic_write_text(args.out, export_det(report.det_points))
    _emit(out, args, {"out": args.out, "n_points": len(report.det_points)},
          f"Wrote {len(report.det_points)} DET points to {args.out}")
    return EXIT_OK

def cmd_serve(args: argparse.Namespace, out: TextIO) -> int:
    # Imported here so the offline commands never load the HTTP stack
    from .api.http_server import run_server
    from .services.leaderboard_service import LeaderboardService

    settings = SettingsManager(args.config).load_settings()
    if settings.get("debug_mode"):
        setup_logger(debug_mode=True)
    service = LeaderboardService(settings)
    service.start()
    host, port = settings["bind"]
    out.write(f"Serving tasks {sorted(int(t) for t in service.keys)} on http://{host}:{port}\n")
    out.flush()
    run_server(service, host, port)
    return EXIT_OK

COMMANDS = {
    'validate': cmd_validate,
    'score': cmd_score,
    'keygen': cmd_keygen,
    'synth': cmd_synth,
    'audit': cmd_audit,
    'det': cmd_det,
    'serve': cmd_serve,
}

def run(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    """
    Parses ``argv`` and runs one subcommand.

    :param argv: Arguments without the program name; ``sys.argv[1:]`` when omitted.
    :type argv: Sequence[str] or None
    :param out: Stream for summaries, standard output when omitted.
    :type out: TextIO or None

    :returns: 0 on success, 1 on domain errors, 2 on usage errors.
    :rtype: int
    """
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    setup_logger(debug_mode=args.debug)
    logger.debug(f"evalkit {__version__}: {args.command} {vars(args)}")
    try:
        return COMMANDS[args.command](args, out)
    except ApplicationError as e:
        logger.error(f"{args.command} failed: {e}")
        sys.stderr.write(f"evalkit {args.command}: {e.user_message}\n")
        if args.json:
            code = getattr(e, 'code', None)
            out.write(json.dumps({"schema_version": SCHEMA_VERSION, "ok": False,
                                  "error": {"code": code.value if code else type(e).__name__,
                                            "message": e.user_message}}, sort_keys=True) + '\n')
        return EXIT_DOMAIN_ERROR
