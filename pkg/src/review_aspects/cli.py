"""Command-line pipeline: ingest, extract, cluster, sentiment, attention, fit, report, simulate.

Every stage reads its inputs from the output directory (or from configured
resource paths), writes CSV/JSON-lines artifacts atomically, and records a
``manifest_<stage>.json`` with parameters, input/output hashes, counts and
timings. Exit codes: 0 success, 1 usage, 2 missing artifact, 3 data
validation failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import dataclasses
import hashlib
import json
import logging
import os
import shutil
import sys
import time
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .aspects import (
    AttributeCandidate,
    cluster_attributes,
    extract_candidates,
    map_mentions,
    read_aspect_model,
    write_aspect_model,
)
from .corpus import interval_week, load_corpus, write_corpus
from .powerfit import (
    BUCKETS,
    DegenerateFitError,
    FIT_TABLE_HEADER,
    InsufficientDataError,
    fit_power_law,
    prepare_fit_input,
    write_fit_diagnostics,
    write_fit_table,
)
from .preprocess import LongestMatchSegmenter
from .resources import ResourceError, load_dictionary, load_embeddings, load_lexicon, load_negations, load_wordlist
from .sentiment import score_mentions, sentiment_series, write_mention_scores, write_sentiment_series
from .simulate import SCENARIOS, write_scenario
from .temporal import (
    all_interval_series,
    aspect_count_ratio_series,
    attention_ranking,
    read_attention_series,
    write_attention_series,
    write_attention_table,
)

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

logger = logging.getLogger("review_aspects")

EXIT_OK, EXIT_USAGE, EXIT_MISSING, EXIT_DATA = 0, 1, 2, 3


class UsageError(Exception):
    pass


class MissingArtifact(Exception):
    def __init__(self, stage: str, path: Path):
        super().__init__(f"{stage}: missing required file {path}")


class DataValidationError(Exception):
    pass


@dataclass
class PipelineConfig:
    out: str = "out"
    corpus: str | None = None
    product: str | None = None
    lexicon: str | None = None
    supplemental_lexicon: str | None = None
    negations: str | None = None
    stoplist: str | None = None
    user_dictionary: str | None = None
    base_dictionary: str | None = None
    embeddings: str | None = None
    aspect_model: str | None = None
    min_tf: int = 20
    max_phrase_len: int = 3
    threshold: float = 0.7
    max_interval: int = 90
    x_offset: int = 1
    T: int = 90
    top_n: int = 10
    sentence_split: bool = False

    def validate(self) -> None:
        if self.min_tf < 0:
            raise UsageError("min_tf must be >= 0")
        if self.max_phrase_len < 1:
            raise UsageError("max_phrase_len must be >= 1")
        if not -1.0 <= self.threshold <= 1.0:
            raise UsageError("threshold must lie in [-1, 1]")
        if self.max_interval < 0:
            raise UsageError("max_interval must be >= 0")
        if self.x_offset < 1:
            raise UsageError("x_offset must be >= 1 so that ti = 0 maps to a positive x")
        if self.T <= 0:
            raise UsageError("T must be positive")
        if self.top_n < 1:
            raise UsageError("top_n must be >= 1")


CONFIG_FIELDS = {f.name: f for f in dataclasses.fields(PipelineConfig)}


def load_config(path: str | None, overrides: dict) -> PipelineConfig:
    values: dict = {}
    if path:
        try:
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        except FileNotFoundError:
            raise UsageError(f"config file {path} not found") from None
        except tomllib.TOMLDecodeError as exc:
            raise UsageError(f"config file {path}: {exc}") from None
        for key, val in raw.items():
            name = key.replace("-", "_")
            if name not in CONFIG_FIELDS:
                raise UsageError(f"config file {path}: unknown key {key!r}")
            if isinstance(val, dict):
                raise UsageError(f"config file {path}: {key!r} must be a flat value")
            values[name] = val
    values.update({k: v for k, v in overrides.items() if v is not None})
    for name, val in values.items():
        kind = CONFIG_FIELDS[name].type
        ok = {
            "int": isinstance(val, int) and not isinstance(val, bool),
            "float": isinstance(val, (int, float)) and not isinstance(val, bool),
            "bool": isinstance(val, bool),
        }.get(kind, isinstance(val, str))
        if not ok:
            raise UsageError(f"{name} must be of type {kind}, got {val!r}")
    cfg = PipelineConfig(**values)
    cfg.validate()
    return cfg


# --------------------------------------------------------------------------
# Artifact plumbing
# --------------------------------------------------------------------------


def sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@contextlib.contextmanager
def atomic(path: Path):
    """Yield a temporary sibling path and move it over ``path`` on success."""
    tmp = path.with_name(f".{path.name}.tmp")
    try:
        yield tmp
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


class Stage:
    def __init__(self, name: str, cfg: PipelineConfig):
        self.name = name
        self.cfg = cfg
        self.out = Path(cfg.out)
        self.inputs: dict[str, Path] = {}
        self.outputs: dict[str, Path] = {}
        self.counts: dict = {}
        self.started = time.perf_counter()

    def require(self, key: str, path) -> Path:
        if path is None:
            raise UsageError(f"{self.name}: no path configured for {key}")
        p = Path(path)
        if not p.is_file():
            raise MissingArtifact(self.name, p)
        self.inputs[key] = p
        return p

    def artifact(self, key: str, filename: str) -> Path:
        p = self.out / filename
        self.outputs[key] = p
        return p

    def finish(self) -> Path:
        manifest = {
            "stage": self.name,
            "version": __version__,
            "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "parameters": dataclasses.asdict(self.cfg),
            "inputs": {k: {"path": str(p), "sha256": sha256(p)} for k, p in self.inputs.items()},
            "outputs": {k: {"path": str(p), "sha256": sha256(p)} for k, p in self.outputs.items()},
            "counts": self.counts,
            "timings": {"seconds": round(time.perf_counter() - self.started, 3)},
        }
        path = self.out / f"manifest_{self.name}.json"
        with atomic(path) as tmp:
            tmp.write_text(json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        return path


def _records(stage: Stage):
    corpus, report = load_corpus(stage.require("records", stage.out / "records.jsonl"), stage.cfg.max_interval)
    if len(report):
        raise DataValidationError(f"{stage.name}: records.jsonl has {len(report)} invalid lines: {report.counts()}")
    return corpus


def _model(stage: Stage, embeddings=None):
    try:
        return read_aspect_model(stage.require("aspect_model", stage.out / "aspect_model.csv"), embeddings)
    except (ValueError, KeyError) as exc:
        raise DataValidationError(f"{stage.name}: bad aspect model: {exc}") from exc


def _write_rows(path: Path, header: list[str], rows) -> None:
    with atomic(path) as tmp:
        with open(tmp, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)


def _write_with(path: Path, writer, *args) -> None:
    with atomic(path) as tmp:
        writer(*args, tmp)


# --------------------------------------------------------------------------
# Stages
# --------------------------------------------------------------------------


def run_ingest(cfg: PipelineConfig) -> int:
    st = Stage("ingest", cfg)
    corpus_path = st.require("corpus", cfg.corpus)
    user = load_dictionary(st.require("user_dictionary", cfg.user_dictionary)) if cfg.user_dictionary else {}
    base = load_dictionary(st.require("base_dictionary", cfg.base_dictionary)) if cfg.base_dictionary else {}
    segmenter = LongestMatchSegmenter(user, base) if (user or base) else None
    corpus, report = load_corpus(corpus_path, cfg.max_interval, cfg.product, segmenter)
    _write_with(st.artifact("records", "records.jsonl"), write_corpus, corpus.records)
    _write_with(st.artifact("rejections", "rejections.csv"), report.write_csv)
    st.counts = {"records": len(corpus), "rejected": len(report), "filtered": report.filtered,
                 "rejections_by_reason": dict(sorted(report.counts().items()))}
    st.finish()
    logger.info("ingest: %d records, %d rejected", len(corpus), len(report))
    if not len(corpus):
        raise DataValidationError("ingest: no valid records")
    return EXIT_OK


def run_extract(cfg: PipelineConfig) -> int:
    st = Stage("extract", cfg)
    corpus = _records(st)
    stop = load_wordlist(st.require("stoplist", cfg.stoplist)) if cfg.stoplist else frozenset()
    cands = extract_candidates(corpus, cfg.min_tf, cfg.max_phrase_len, stop)
    _write_rows(st.artifact("candidates", "candidates.csv"), ["surface", "tf"], [(c.surface, c.tf) for c in cands])
    st.counts = {"records": len(corpus), "candidates": len(cands)}
    st.finish()
    return EXIT_OK


def run_cluster(cfg: PipelineConfig) -> int:
    st = Stage("cluster", cfg)
    target = st.artifact("aspect_model", "aspect_model.csv")
    if cfg.aspect_model:
        src = st.require("aspect_model_override", cfg.aspect_model)
        try:
            model = read_aspect_model(src)
        except (ValueError, KeyError) as exc:
            raise DataValidationError(f"cluster: bad aspect model override: {exc}") from exc
        _write_with(target, write_aspect_model, model)
        excluded: list[str] = []
    else:
        cand_path = st.require("candidates", st.out / "candidates.csv")
        emb = load_embeddings(st.require("embeddings", cfg.embeddings))
        with open(cand_path, newline="", encoding="utf-8") as fh:
            cands = [AttributeCandidate(r["surface"], int(r["tf"])) for r in csv.DictReader(fh)]
        model = cluster_attributes(cands, emb, cfg.threshold)
        excluded = model.excluded
        _write_with(target, write_aspect_model, model)
        st.counts["embedding_rows_rejected"] = emb.rejected
    _write_rows(st.artifact("excluded", "excluded.csv"), ["attribute", "reason"],
                [(w, "no_embedding") for w in excluded])
    st.counts.update({"aspects": len(model), "attributes": len(model.attributes), "excluded": len(excluded)})
    st.finish()
    return EXIT_OK


def run_sentiment(cfg: PipelineConfig) -> int:
    st = Stage("sentiment", cfg)
    corpus = _records(st)
    model = _model(st)
    lex = load_lexicon(
        st.require("lexicon", cfg.lexicon),
        st.require("supplemental_lexicon", cfg.supplemental_lexicon) if cfg.supplemental_lexicon else None,
    )
    neg = load_negations(st.require("negations", cfg.negations))
    scores = score_mentions(corpus, model, lex, neg, sentence_split=cfg.sentence_split)
    series = sentiment_series(scores, model)
    _write_with(st.artifact("mention_sentiment", "mention_sentiment.csv"), write_mention_scores, scores)
    _write_with(st.artifact("sentiment_series", "sentiment_series.csv"), write_sentiment_series, series)
    st.counts = {"mentions": len(scores), "neutral": sum(s.score == 0 for s in scores)}
    st.finish()
    return EXIT_OK


def run_attention(cfg: PipelineConfig) -> int:
    st = Stage("attention", cfg)
    corpus = _records(st)
    model = _model(st)
    mentions = map_mentions(corpus, model)
    series = all_interval_series(corpus, model, mentions)
    ranking = attention_ranking(corpus, model, cfg.T, mentions)
    ratio = aspect_count_ratio_series(corpus, model, mentions=mentions)

    _write_with(st.artifact("attention_series", "attention_series.csv"), write_attention_series, series)
    _write_with(st.artifact("attention_table", "attention_table.csv"), write_attention_table, ranking)
    _write_rows(st.artifact("aspect_ratio", "aspect_ratio.csv"), ["ti", "n_aspects", "ratio"],
                [(ti, round(r * len(model)), f"{r:.6f}") for ti, r in ratio.items()])

    grid: Counter = Counter()
    for rec in corpus.records:
        for aid in sorted({m.aspect_id for m in mentions[rec.id]}):
            grid[rec.purchase_time.date().isoformat(), rec.interval_days, aid] += 1
    _write_rows(st.artifact("by_purchase_date", "attention_by_purchase_date.csv"),
                ["purchase_date", "ti", "week", "aspect_id", "reviews"],
                [(d, ti, interval_week(ti), aid, n) for (d, ti, aid), n in sorted(grid.items())])
    st.counts = {"records": len(corpus), "records_with_mentions": sum(bool(v) for v in mentions.values()),
                 "mentions": sum(len(v) for v in mentions.values()), "aspects": len(model)}
    st.finish()
    return EXIT_OK


def run_fit(cfg: PipelineConfig) -> int:
    st = Stage("fit", cfg)
    series = read_attention_series(st.require("attention_series", st.out / "attention_series.csv"))
    model = _model(st)
    rows = []
    for a in model.clusters:
        counts = series.get(a.id, {})
        try:
            fit = fit_power_law(prepare_fit_input(counts, cfg.x_offset))
            rows.append((a.id, a.label, fit, ""))
        except (InsufficientDataError, DegenerateFitError) as exc:
            rows.append((a.id, a.label, None, str(exc).split(":")[0]))
    _write_with(st.artifact("fit_table", "fit_table.csv"), write_fit_table, rows)
    _write_with(st.artifact("fit_diagnostics", "fit_diagnostics.csv"), write_fit_diagnostics, rows)
    st.counts = {"aspects": len(rows), "fitted": sum(r[2] is not None for r in rows),
                 "by_bucket": dict(Counter(r[2].bucket for r in rows if r[2] is not None))}
    st.finish()
    return EXIT_OK


REPORT_INPUTS = {
    "fit_table": "fit_table.csv",
    "attention_table": "attention_table.csv",
    "aspect_ratio": "aspect_ratio.csv",
    "sentiment_series": "sentiment_series.csv",
    "by_purchase_date": "attention_by_purchase_date.csv",
}


def _read_csv(path: Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def run_report(cfg: PipelineConfig) -> int:
    st = Stage("report", cfg)
    paths = {k: st.require(k, st.out / f) for k, f in REPORT_INPUTS.items()}
    rep = st.out / "report"
    rep.mkdir(parents=True, exist_ok=True)

    fits = _read_csv(paths["fit_table"])
    order = {b: i for i, b in enumerate(BUCKETS)}
    fits.sort(key=lambda r: (order.get(r["bucket"], len(order)), int(r["aspect_id"])))
    _write_rows(st.artifact("fit_table", "report/fit_table.csv"), FIT_TABLE_HEADER,
                [[r[h] for h in FIT_TABLE_HEADER] for r in fits])

    top = _read_csv(paths["attention_table"])[: cfg.top_n]
    _write_rows(st.artifact("attention_top", f"report/attention_top{cfg.top_n}.csv"),
                ["rank", "aspect", "average_attention"],
                [[r["rank"], r["aspect"], r["average_attention"]] for r in top])
    for key in ("aspect_ratio", "sentiment_series", "by_purchase_date"):
        dest = st.artifact(key, f"report/{paths[key].name}")
        with atomic(dest) as tmp:
            shutil.copyfile(paths[key], tmp)

    lines = ["Power-law fits by R² group:"]
    for b in BUCKETS:
        group = [r for r in fits if r["bucket"] == b]
        lines.append(f"  {b}: " + (", ".join(
            f"{r['label']} (c={r['intercept']}, b={r['coefficient']}, R²={r['r2']})" for r in group) or "-"))
    lines.append(f"Top {len(top)} aspects by average attention:")
    lines += [f"  {r['rank']:>3}  {r['aspect']:<16}{r['average_attention']}" for r in top]
    summary = "\n".join(lines) + "\n"
    with atomic(st.artifact("summary", "report/summary.txt")) as tmp:
        tmp.write_text(summary, encoding="utf-8")
    print(summary, end="")
    st.counts = {"fit_rows": len(fits), "top_n": len(top)}
    st.finish()
    return EXIT_OK


def run_simulate(cfg: PipelineConfig, scenario: str, seed: int | None) -> int:
    st = Stage("simulate", cfg)
    spec = SCENARIOS[scenario]() if seed is None else SCENARIOS[scenario](seed)
    paths = write_scenario(spec, st.out)
    st.outputs.update(paths)
    st.counts = {"scenario": scenario, "seed": spec.seed, "aspects": len(spec.aspects)}
    with open(paths["corpus"], encoding="utf-8") as fh:
        st.counts["reviews"] = sum(1 for _ in fh)
    st.finish()
    return EXIT_OK


STAGES = {
    "ingest": run_ingest,
    "extract": run_extract,
    "cluster": run_cluster,
    "sentiment": run_sentiment,
    "attention": run_attention,
    "fit": run_fit,
    "report": run_report,
}


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat TOML file with pipeline settings; flags override it")
    p.add_argument("--out", help="artifact directory (default: out)")
    p.add_argument("--max-interval", type=int, dest="max_interval")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="review-aspects", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="validate and tokenize the review corpus")
    _add_common(p)
    p.add_argument("--corpus")
    p.add_argument("--product")
    p.add_argument("--user-dictionary", dest="user_dictionary")
    p.add_argument("--base-dictionary", dest="base_dictionary")

    p = sub.add_parser("extract", help="count frequent noun / noun-phrase candidates")
    _add_common(p)
    p.add_argument("--stoplist")
    p.add_argument("--min-tf", type=int, dest="min_tf")
    p.add_argument("--max-phrase-len", type=int, dest="max_phrase_len")

    p = sub.add_parser("cluster", help="cluster candidates into aspects")
    _add_common(p)
    p.add_argument("--embeddings")
    p.add_argument("--threshold", type=float)
    p.add_argument("--aspect-model", dest="aspect_model", help="use this aspect_id,label,member CSV instead")

    p = sub.add_parser("sentiment", help="score attribute mentions and aggregate per interval")
    _add_common(p)
    p.add_argument("--lexicon")
    p.add_argument("--supplemental-lexicon", dest="supplemental_lexicon")
    p.add_argument("--negations")
    p.add_argument("--sentence-split", action="store_true", default=None, dest="sentence_split")

    p = sub.add_parser("attention", help="attention series, average attention and aspect ratio")
    _add_common(p)
    p.add_argument("--T", type=int, dest="T")

    p = sub.add_parser("fit", help="fit power laws to the attention series")
    _add_common(p)
    p.add_argument("--x-offset", type=int, dest="x_offset")

    p = sub.add_parser("report", help="bundle report tables")
    _add_common(p)
    p.add_argument("--top-n", type=int, dest="top_n")

    p = sub.add_parser("simulate", help="write a synthetic corpus with planted ground truth")
    _add_common(p)
    p.add_argument("--scenario", choices=sorted(SCENARIOS), default="default")
    p.add_argument("--seed", type=int)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    overrides = {k: v for k, v in vars(args).items() if k in CONFIG_FIELDS}
    try:
        cfg = load_config(args.config, overrides)
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        if args.command == "simulate":
            return run_simulate(cfg, args.scenario, args.seed)
        return STAGES[args.command](cfg)
    except UsageError as exc:
        print(f"review-aspects: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MissingArtifact as exc:
        print(f"review-aspects: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (DataValidationError, ResourceError) as exc:
        print(f"review-aspects: data validation failed: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
