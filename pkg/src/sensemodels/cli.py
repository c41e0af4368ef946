"""Command-line surface: extract features, search models, evaluate, export graphs.

Runs are driven by a YAML configuration file; a few scalars can be overridden
by flags.  All randomness flows from the config seed, so identical configs and
inputs produce byte-identical outputs.

Exit codes: 0 success, 2 usage/config, 3 capability limit, 4 data/model
mismatch, 1 internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import yaml

from .classify import Prediction, classify, evaluate_predictions
from .corpus import collect_instances, parse_corpus, split
from .decomposable import (
    export_bayes_dot,
    export_markov_dot,
    fit_mle,
    graph_from_text,
    junction_tree,
)
from .errors import (
    CapabilityError,
    ConfigError,
    CorpusParseError,
    DecomposabilityError,
    SchemaMismatchError,
)
from .features import TAG, FeatureSpec, candidate_collocations, score_collocations, vectorize
from .goodness import search_models
from .tables import VariableSchema, build_table, schema_from_text, schema_to_text

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_CAPABILITY = 3
EXIT_DATA = 4

SCHEMA_FILE = "schema.txt"
TRAIN_FILE = "train_assignments.txt"
TEST_FILE = "test_assignments.txt"
COLLOCATIONS_FILE = "collocations.txt"
SEARCH_FILE = "search.txt"
EVALUATION_FILE = "evaluation.txt"
PREDICTIONS_FILE = "predictions.txt"


@dataclass
class RunConfig:
    corpus: Path
    target_lemma: str
    target_forms: tuple[str, ...]
    noun_tags: tuple[str, ...]
    senses: tuple[str, ...]
    use_ending: bool
    pos_offsets: tuple[int, ...]
    colloc_candidates: int
    colloc_select: int
    pos_collapse: dict[str, str] | None
    n_test: int
    seed: int
    strategy: str
    alpha: float
    sparsity_threshold: float
    max_vars: int
    output_dir: Path


def _require(mapping: Mapping, key: str, context: str):
    if not isinstance(mapping, Mapping) or key not in mapping:
        raise ConfigError(f"missing required config field {context}{key}")
    return mapping[key]


def load_config(path: Path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    data = yaml.safe_load(path.read_text(encoding="utf-8"))
    if not isinstance(data, Mapping):
        raise ConfigError(f"config file {path} is not a key/value document")
    base = path.parent

    target = _require(data, "target", "")
    features = data.get("features", {}) or {}
    collocs = features.get("collocations", {}) or {}
    split_cfg = data.get("split", {}) or {}
    search_cfg = data.get("search", {}) or {}

    pos_collapse = features.get("pos_collapse", "first_letter")
    if pos_collapse in (None, "first_letter"):
        collapse_map = None
    elif isinstance(pos_collapse, Mapping):
        collapse_map = {str(k): str(v) for k, v in pos_collapse.items()}
    else:
        raise ConfigError("features.pos_collapse must be 'first_letter' or a tag mapping")

    senses = tuple(str(s) for s in _require(data, "senses", ""))
    if len(senses) < 2:
        raise ConfigError("at least 2 senses are required")

    cfg = RunConfig(
        corpus=base / str(_require(data, "corpus", "")),
        target_lemma=str(_require(target, "lemma", "target.")).lower(),
        target_forms=tuple(str(f).lower() for f in _require(target, "forms", "target.")),
        noun_tags=tuple(str(t) for t in _require(target, "noun_tags", "target.")),
        senses=senses,
        use_ending=bool(features.get("ending", True)),
        pos_offsets=tuple(int(o) for o in features.get("pos_offsets", (-2, -1, 1, 2))),
        colloc_candidates=int(collocs.get("candidates", 400)),
        colloc_select=int(collocs.get("select", 5)),
        pos_collapse=collapse_map,
        n_test=int(_require(split_cfg, "n_test", "split.")),
        seed=int(_require(split_cfg, "seed", "split.")),
        strategy=str(search_cfg.get("strategy", "greedy")),
        alpha=float(search_cfg.get("alpha", 0.05)),
        sparsity_threshold=float(search_cfg.get("sparsity_threshold", 0.20)),
        max_vars=int(search_cfg.get("max_vars", 6)),
        output_dir=base / str(data.get("output_dir", "out")),
    )
    if cfg.strategy not in ("exhaustive", "greedy"):
        raise ConfigError(f"search.strategy must be exhaustive or greedy, got {cfg.strategy!r}")
    if not 0 < cfg.alpha < 1:
        raise ConfigError(f"search.alpha must lie in (0, 1), got {cfg.alpha}")
    if cfg.n_test < 0 or cfg.seed < 0:
        raise ConfigError("split.n_test and split.seed must be non-negative")
    if cfg.colloc_candidates < 1 or cfg.colloc_select < 0:
        raise ConfigError("collocation counts out of range")
    return cfg


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _read(path: Path) -> str:
    if not path.is_file():
        raise ConfigError(f"required file not found: {path}")
    return Path(path).read_text(encoding="utf-8")


def assignments_to_text(schema: VariableSchema, rows: Sequence[tuple[int, Mapping[str, str]]]) -> str:
    lines = ["# id " + " ".join(schema.names)]
    for ident, row in rows:
        lines.append(str(ident) + " " + " ".join(row[name] for name in schema.names))
    return "\n".join(lines) + "\n"


def assignments_from_text(schema: VariableSchema, text: str) -> list[tuple[int, dict[str, str]]]:
    rows: list[tuple[int, dict[str, str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 1 + len(schema.names):
            raise SchemaMismatchError(
                f"line {lineno}: expected id plus {len(schema.names)} values, got {len(fields)} fields"
            )
        row = dict(zip(schema.names, fields[1:]))
        schema.cell_index(row)  # validates every value label
        rows.append((int(fields[0]), row))
    return rows


def cmd_extract(cfg: RunConfig) -> int:
    """corpus -> instances -> split -> collocation selection -> vectorized files."""
    if not cfg.corpus.is_file():
        raise ConfigError(f"corpus file not found: {cfg.corpus}")
    sentences = parse_corpus(cfg.corpus.read_text(encoding="utf-8"))
    dataset = collect_instances(sentences, cfg.target_forms, cfg.noun_tags, str(cfg.corpus))
    if not dataset.instances:
        raise SchemaMismatchError("no annotated target instances found in the corpus")
    unknown = sorted({i.sense for i in dataset.instances} - set(cfg.senses))
    if unknown:
        raise SchemaMismatchError(f"corpus uses sense labels outside the inventory: {unknown}")

    train, test = split(dataset, cfg.n_test, cfg.seed)
    spec_base = FeatureSpec(target_lemma=cfg.target_lemma)
    exclude = set(cfg.target_forms) | set(spec_base.target_word_forms)
    candidates = candidate_collocations(train.instances, cfg.colloc_candidates, exclude)
    if cfg.colloc_select > len(candidates):
        raise SchemaMismatchError(
            f"cannot select {cfg.colloc_select} collocations from {len(candidates)} candidates"
        )
    scored = score_collocations(train.instances, candidates, cfg.senses)
    chosen = scored[: cfg.colloc_select]

    spec = FeatureSpec(
        target_lemma=cfg.target_lemma,
        use_ending=cfg.use_ending,
        pos_offsets=cfg.pos_offsets,
        collocation_forms=tuple(form for form, _ in chosen),
        pos_collapse_map=cfg.pos_collapse,
    )
    schema, rows = vectorize(dataset.instances, spec, cfg.senses)
    test_ids = {inst.ident for inst in test.instances}
    keyed = [(inst.ident, row) for inst, row in zip(dataset.instances, rows)]
    train_rows = [(i, r) for i, r in keyed if i not in test_ids]
    test_rows = [(i, r) for i, r in keyed if i in test_ids]

    out = cfg.output_dir
    _write(out / SCHEMA_FILE, schema_to_text(schema))
    _write(out / TRAIN_FILE, assignments_to_text(schema, train_rows))
    _write(out / TEST_FILE, assignments_to_text(schema, test_rows))
    report_lines = ["form\tg2\tdf\tp"]
    for form, rep in chosen:
        report_lines.append(f"{form}\t{rep.g2:.6f}\t{rep.df}\t{rep.p_value:.6e}")
    _write(out / COLLOCATIONS_FILE, "\n".join(report_lines) + "\n")

    print(
        f"extracted {len(dataset.instances)} instances "
        f"({dataset.skipped_unannotated} unannotated target occurrences skipped); "
        f"train={len(train.instances)} test={len(test.instances)}; "
        f"selected collocations: {', '.join(f for f, _ in chosen) or '(none)'}"
    )
    return EXIT_OK


def _load_dataset_files(cfg: RunConfig):
    schema = schema_from_text(_read(cfg.output_dir / SCHEMA_FILE))
    train_rows = assignments_from_text(schema, _read(cfg.output_dir / TRAIN_FILE))
    test_rows = assignments_from_text(schema, _read(cfg.output_dir / TEST_FILE))
    return schema, train_rows, test_rows


def cmd_search(cfg: RunConfig) -> int:
    """Rank candidate decomposable models on the training contingency table."""
    schema, train_rows, _ = _load_dataset_files(cfg)
    table = build_table([row for _, row in train_rows], schema)
    result = search_models(
        table,
        strategy=cfg.strategy,
        alpha=cfg.alpha,
        sparsity_threshold=cfg.sparsity_threshold,
        max_vars=cfg.max_vars,
    )
    _write(cfg.output_dir / SEARCH_FILE, result.to_text())
    best_model, best_report = result.entries[0]
    edges = " ".join(f"{u}|{v}" for u, v in best_model.graph.edges) or "(independence)"
    print(
        f"evaluated {len(result.entries)} models ({cfg.strategy}); best: {edges} "
        f"g2={best_report.g2:.4f} df={best_report.df} p={best_report.p_value:.4g}"
    )
    return EXIT_OK


def _restrict_senses(schema: VariableSchema, rows, keep: tuple[str, ...]):
    declared = schema.values_of(TAG)
    unknown = [s for s in keep if s not in declared]
    if unknown:
        raise ConfigError(f"--four-senses labels not in the schema: {unknown}")
    kept_values = tuple(v for v in declared if v in set(keep))
    variables = [
        (name, kept_values if name == TAG else values) for name, values in schema.variables
    ]
    restricted = VariableSchema(variables)
    kept_rows = [(i, r) for i, r in rows if r[TAG] in set(keep)]
    return restricted, kept_rows


def cmd_evaluate(cfg: RunConfig, model_path: Path, four_senses: tuple[str, ...] | None) -> int:
    """Fit the named model on training data and score the test set."""
    schema, train_rows, test_rows = _load_dataset_files(cfg)
    graph = graph_from_text(_read(Path(model_path)))
    if four_senses:
        schema, train_rows = _restrict_senses(schema, train_rows, four_senses)
        _, test_rows = _restrict_senses(schema, test_rows, four_senses)

    missing = sorted(set(graph.vertices) - set(schema.names))
    if missing:
        raise SchemaMismatchError(f"model variables not in the dataset schema: {missing}")
    if TAG not in graph.vertices:
        raise SchemaMismatchError(f"model must include the {TAG!r} variable to classify")

    sub_schema = schema.restrict(graph.vertices)
    model = junction_tree(graph)
    train_table = build_table(
        [{v: row[v] for v in sub_schema.names} for _, row in train_rows], sub_schema
    )
    fitted = fit_mle(model, train_table)

    predictions: list[Prediction] = []
    golds: list[str] = []
    for ident, row in test_rows:
        features = {v: row[v] for v in sub_schema.names if v != TAG}
        predictions.append(classify(fitted, features, TAG, instance_id=ident))
        golds.append(row[TAG])
    report = evaluate_predictions(predictions, golds)

    _write(cfg.output_dir / EVALUATION_FILE, report.to_text())
    pred_lines = ["# id outcome sense score"]
    for pred in predictions:
        if pred.tagged:
            pred_lines.append(f"{pred.instance_id} tagged {pred.sense} {pred.score:.12e}")
        else:
            pred_lines.append(f"{pred.instance_id} untagged - -")
    _write(cfg.output_dir / PREDICTIONS_FILE, "\n".join(pred_lines) + "\n")

    if report.total == 0:
        print("evaluation: empty test set, nothing to score")
    else:
        print(
            f"evaluation: {report.correct}/{report.total} correct "
            f"({100.0 * report.percent_correct:.1f}%), "
            f"{report.wrong_tagged} wrong, {report.untagged} untagged"
        )
    return EXIT_OK


def cmd_export(model_path: Path, view: str, root: str) -> int:
    """Print the DOT rendering of a model file to standard output."""
    model = junction_tree(graph_from_text(_read(Path(model_path))))
    if view == "markov":
        sys.stdout.write(export_markov_dot(model))
    elif view == "bayes":
        sys.stdout.write(export_bayes_dot(model, root=root))
    else:
        raise ConfigError(f"unknown view {view!r}: expected markov or bayes")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sensemodels",
        description="Decomposable probabilistic models for word-sense disambiguation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p: argparse.ArgumentParser):
        p.add_argument("--config", required=True, type=Path, help="run configuration YAML")
        p.add_argument("--seed", type=int, default=None, help="override split.seed")
        p.add_argument("--alpha", type=float, default=None, help="override search.alpha")
        p.add_argument(
            "--strategy", choices=["exhaustive", "greedy"], default=None,
            help="override search.strategy",
        )

    add_config(sub.add_parser("extract", help="corpus -> feature dataset files"))
    add_config(sub.add_parser("search", help="rank decomposable models on training data"))

    p_eval = sub.add_parser("evaluate", help="fit a model file and score the test set")
    add_config(p_eval)
    p_eval.add_argument("--model", required=True, type=Path, help="model file to fit")
    p_eval.add_argument(
        "--four-senses", default=None,
        help="comma-separated sense labels to keep; all others are removed "
        "from both train and test before evaluation",
    )

    p_export = sub.add_parser("export", help="print the DOT view of a model file")
    p_export.add_argument("--model", required=True, type=Path, help="model file to export")
    p_export.add_argument("--view", required=True, choices=["markov", "bayes"])
    p_export.add_argument("--root", default="tag", help="ancestor variable for the bayes view")
    return parser


def _configure(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if getattr(args, "alpha", None) is not None:
        cfg = dataclasses.replace(cfg, alpha=args.alpha)
    if getattr(args, "strategy", None) is not None:
        cfg = dataclasses.replace(cfg, strategy=args.strategy)
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "extract":
            return cmd_extract(_configure(args))
        if args.command == "search":
            return cmd_search(_configure(args))
        if args.command == "evaluate":
            four = tuple(s for s in args.four_senses.split(",") if s) if args.four_senses else None
            return cmd_evaluate(_configure(args), args.model, four)
        if args.command == "export":
            return cmd_export(args.model, args.view, args.root)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (SchemaMismatchError, CorpusParseError, DecomposabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
