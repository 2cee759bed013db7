"""Command-line entry point.

    ud2lf [--config FILE] {convert,stats,agree,trends,compare,derive} [options]

Settings come from flags, then the config file (flat ``key = value``),
then defaults.  Everything is validated and computed before the first
output file is written, so a failing run leaves nothing behind.

Exit codes: 0 success, 1 usage/config, 2 input/output, 3 internal error.
"""
from __future__ import annotations

import argparse
import logging
import sys
import traceback
from dataclasses import dataclass, fields
from pathlib import Path

from . import analytics, lam
from .patterns import RuleSyntaxError
from .transducer import LANGUAGES, convert_corpus, default_converter
from .treebank import ConlluError, StructureError, group_sessions, read_conllu

log = logging.getLogger("ud2lf")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INTERNAL = 0, 1, 2, 3
COMMANDS = ("convert", "stats", "agree", "trends", "compare", "derive")


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    lang: str = "en"
    rules_rewrite: str | None = None
    rules_lf: str | None = None
    priorities: str | None = None
    inputs: tuple = ()
    out: str | None = None
    threshold: float = analytics.DEFAULT_THRESHOLD
    smooth: int = analytics.DEFAULT_SMOOTH
    jobs: int = 1
    drop_incomplete: bool = False
    exclude_punct: bool = False
    max_steps: int = lam.DEFAULT_MAX_STEPS
    sentence: str | None = None


# config-file key -> RunConfig field
KEYS = {f.name: f.name for f in fields(RunConfig)}
KEYS["in"] = "inputs"
del KEYS["inputs"]

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _bool(key, value):
    v = str(value).strip().lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise UsageError(f"{key}: expected a boolean, got {value!r}")


def _int(key, value, low):
    try:
        n = int(value)
    except (TypeError, ValueError):
        raise UsageError(f"{key}: expected an integer, got {value!r}") from None
    if n < low:
        raise UsageError(f"{key}: must be at least {low}")
    return n


def _float(key, value):
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise UsageError(f"{key}: expected a number, got {value!r}") from None
    if not x >= 0:
        raise UsageError(f"{key}: must be non-negative")
    return x


def read_config_file(path):
    """Parse a flat ``key = value`` file into {field: raw value}."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror or exc}") from None
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        if key not in KEYS:
            raise UsageError(f"{path}:{lineno}: unknown setting {key!r}")
        value = value.strip()
        if key == "in":
            out["inputs"] = tuple(p.strip() for p in value.split(",") if p.strip())
        else:
            out[KEYS[key]] = value
    return out


def build_config(args):
    """Merge defaults, config file and flags; validate types and files."""
    raw = {}
    if args.config:
        raw.update(read_config_file(args.config))
    for name in (f.name for f in fields(RunConfig)):
        value = getattr(args, name, None)
        if value is not None:
            raw[name] = tuple(value) if name == "inputs" else value
    cfg = RunConfig()
    for name, value in raw.items():
        if name in ("jobs", "max_steps"):
            value = _int(name.replace("_", "-"), value, 1)
        elif name == "smooth":
            value = _int("smooth", value, 1)
            if value % 2 == 0:
                raise UsageError("smooth: a centered window needs an odd number of sessions")
        elif name == "threshold":
            value = _float("threshold", value)
        elif name in ("drop_incomplete", "exclude_punct"):
            value = _bool(name.replace("_", "-"), value)
        setattr(cfg, name, value)
    if cfg.lang not in LANGUAGES:
        raise UsageError(f"lang: expected one of {', '.join(LANGUAGES)}, got {cfg.lang!r}")
    for name in ("rules_rewrite", "rules_lf", "priorities"):
        path = getattr(cfg, name)
        if path is not None and not Path(path).is_file():
            raise UsageError(f"{name.replace('_', '-')}: no such file {path}")
    need = {"agree": 2, "compare": 2}.get(args.command, 1)
    if len(cfg.inputs) != need:
        raise UsageError(f"{args.command} needs exactly {need} --in file(s), got {len(cfg.inputs)}")
    if cfg.out is not None and Path(cfg.out).exists() and not Path(cfg.out).is_dir():
        raise UsageError(f"out: {cfg.out} exists and is not a directory")
    return cfg


def load_converter(cfg):
    try:
        return default_converter(cfg.lang, cfg.rules_rewrite, cfg.rules_lf, cfg.priorities,
                                 cfg.max_steps)
    except (RuleSyntaxError, lam.LfSyntaxError, lam.LfTypeError, ValueError) as exc:
        raise UsageError(f"invalid rules: {exc}") from None
    except OSError as exc:
        raise UsageError(f"cannot read rules: {exc}") from None


def read_input(path, cfg):
    try:
        return read_conllu(path, drop_incomplete=cfg.drop_incomplete)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    except (ConlluError, StructureError) as exc:
        raise InputError(f"{path}: {exc}") from None


# ---------------------------------------------------------------- commands
# each returns {filename: text}; the first entry goes to stdout without --out

def cmd_convert(cfg):
    converter = load_converter(cfg)
    trees = read_input(cfg.inputs[0], cfg)
    outcomes, summary = convert_corpus(trees, converter, jobs=cfg.jobs)
    rec = summary.to_record()
    rows = [("total", rec["total"]), ("converted", rec["converted"]), ("rate", rec["rate"])]
    rows += [(f"failed:{k}", v) for k, v in sorted(rec["failures"].items())]
    return {
        "conversions.jsonl": "".join(o.to_json() + "\n" for o in outcomes),
        "summary.tsv": analytics.render_tsv(("key", "value"), rows),
        "summary.json": analytics.render_json(rec),
    }


def cmd_stats(cfg):
    converter = load_converter(cfg)
    trees = read_input(cfg.inputs[0], cfg)
    stats = analytics.label_counts(trees)
    outcomes, _ = convert_corpus(trees, converter, jobs=cfg.jobs)
    rates = analytics.conversion_rates(stats, outcomes)
    rows = [(lab, c, f, p, rates[lab].converted, rates[lab].rate)
            for lab, c, f, p in stats.rows()]
    doc = analytics.render_json({
        "tokens": stats.tokens, "sentences": stats.sentences,
        "mean_tokens_per_sentence": stats.mean_length,
        "converted_sentences": rates.converted_sentences,
        "conversion_rate": rates.overall if rates.overall is not None else "n/a",
        "labels": {r[0]: {"count": r[1], "per_token": r[2], "sentence_proportion": r[3],
                          "converted": r[4], "conversion_rate": r[5]} for r in rows},
    })
    return {
        "labels.tsv": analytics.render_tsv(
            ("label", "count", "per_token", "sentence_proportion", "converted",
             "conversion_rate"), rows),
        "labels.json": doc,
    }


def cmd_agree(cfg):
    a = read_input(cfg.inputs[0], cfg)
    b = read_input(cfg.inputs[1], cfg)
    report = analytics.attachment_agreement(a, b, exclude_punct=cfg.exclude_punct)
    return {"agreement.tsv": report.to_tsv(), "agreement.json": report.to_json()}


def cmd_trends(cfg):
    sessions = group_sessions(read_input(cfg.inputs[0], cfg))
    report = analytics.longitudinal_trends(sessions, smooth=cfg.smooth)
    if all(tr.fit is None for tr in report.trends):
        raise InputError(f"no label could be fitted over {len(sessions)} session(s): "
                         "at least 3 sessions with distinct ages are needed")
    return {"trends.tsv": report.to_tsv(), "trends.json": report.to_json(),
            "points.tsv": report.points_tsv()}


def cmd_compare(cfg):
    a = analytics.label_counts(read_input(cfg.inputs[0], cfg))
    b = analytics.label_counts(read_input(cfg.inputs[1], cfg))
    table = analytics.compare_corpora(a, b, cfg.threshold)
    return {"compare.tsv": table.to_tsv(), "compare.json": table.to_json()}


def cmd_derive(cfg):
    converter = load_converter(cfg)
    trees = read_input(cfg.inputs[0], cfg)
    if not trees:
        raise InputError(f"{cfg.inputs[0]}: no sentences")
    if cfg.sentence is None:
        tree = trees[0]
    else:
        found = [t for t in trees if t.sentence_id == cfg.sentence]
        if not found:
            raise InputError(f"sentence {cfg.sentence!r} not found in {cfg.inputs[0]}")
        tree = found[0]
    outcome = converter.convert(tree, keep_derivation=True)
    lines = []
    if outcome.derivation is not None:
        lines.append(outcome.derivation.dump().rstrip("\n"))
    else:
        lines.append(f"# sentence {tree.sentence_id}")
    if not outcome.ok:
        lines.append(f"failed: {outcome.failure} at tokens {list(outcome.tokens)}: "
                     f"{outcome.detail}")
    return {"derivation.txt": "\n".join(lines) + "\n"}


HANDLERS = {"convert": cmd_convert, "stats": cmd_stats, "agree": cmd_agree,
            "trends": cmd_trends, "compare": cmd_compare, "derive": cmd_derive}


def write_outputs(files, out):
    if out is None:
        sys.stdout.write(next(iter(files.values())))
        return
    try:
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            with open(d / name, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
    except OSError as exc:
        raise InputError(f"cannot write output: {exc}") from None


# ---------------------------------------------------------------- parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_settings(parser, default):
    g = parser.add_argument_group("settings (override the config file)")
    add = lambda *a, **kw: g.add_argument(*a, default=default, **kw)  # noqa: E731
    add("--config", help="flat key = value settings file")
    add("--lang", help=f"language: {', '.join(LANGUAGES)} (default en)")
    add("--rules-rewrite", help="rewrite rule file (default: bundled)")
    add("--rules-lf", help="LF assignment rule file (default: bundled)")
    add("--priorities", help="composition priority list (default: bundled)")
    add("--in", dest="inputs", action="append", metavar="PATH",
        help="CoNLL-U input; give twice for agree/compare")
    add("--out", help="output directory (default: main report to stdout)")
    add("--threshold", help="compare: per-token difference cutoff (default 0.005)")
    add("--smooth", help="trends: moving-average window in sessions (default 5)")
    add("--jobs", help="worker processes for conversion (default 1)")
    add("--drop-incomplete", action=argparse.BooleanOptionalAction,
        help="skip utterances marked incomplete")
    add("--exclude-punct", action=argparse.BooleanOptionalAction,
        help="agree: leave punctuation out of LAS/UAS")
    add("--max-steps", help="beta-reduction step limit (default 10000)")
    add("--sentence", help="derive: sentence id (default: the first)")


def build_parser():
    parser = _Parser(prog="ud2lf",
                     description="UD trees to typed logical forms, plus corpus statistics.")
    _add_settings(parser, None)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    helps = {
        "convert": "convert sentences to logical forms (JSON lines + summary)",
        "stats": "label counts and per-label conversion rates",
        "agree": "labeled/unlabeled attachment agreement of two treebanks",
        "trends": "per-label regression of sentence proportion on child age",
        "compare": "labels whose per-token frequency differs between two corpora",
        "derive": "dump the full derivation of one sentence",
    }
    for name in COMMANDS:
        # settings are accepted on either side of the subcommand; SUPPRESS
        # keeps the subparser from resetting values given before it
        _add_settings(sub.add_parser(name, help=helps[name]), argparse.SUPPRESS)
    return parser


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="ud2lf: %(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a command is required: " + ", ".join(COMMANDS))
        cfg = build_config(args)
        files = HANDLERS[args.command](cfg)
        write_outputs(files, cfg.out)
    except UsageError as exc:
        print(f"ud2lf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, analytics.AnalyticsError) as exc:
        print(f"ud2lf: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KeyboardInterrupt:
        return EXIT_INTERNAL
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        print("ud2lf: internal error", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
