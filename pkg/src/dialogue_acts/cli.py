"""Command-line entry point.

Subcommands: train, predict, eval, cv, bench, gen. All diagnostics go to
standard error; primary output goes to --output or standard output.
Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import (Corpus, CorpusError, Dialogue, SchemaError, TagSchema,
                     Turn, Utterance, default_schema, load_schema,
                     parse_corpus, serialize_corpus)
from .features import CueLexicon, VerbLexicon, default_cue_lexicon, default_verb_lexicon
from .hierarchy import (HierConfig, decode_dialogue, load_model, model_to_json,
                        save_model, train_hierarchical)
from .evaluation import (benchmark_structures, cross_validate, evaluate_model,
                         render_timing)
from .svm import TrainConfig
from .synth import GeneratorConfig, default_grammar, generate_corpus, load_grammar


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


@dataclass
class RunConfig:
    corpus: str | None = None
    schema: str | None = None
    model: str | None = None
    cues: str | None = None
    verbs: str | None = None
    grammar: str | None = None
    output: str | None = None
    c: float = 1.0
    tol: float = 1e-3
    alpha: float = 1.0
    min_freq: int = 1
    k: int = 10
    seed: int = 0
    n_dialogues: int = 200
    noise: float = 0.0
    structure: str = "ovo"
    strict_hierarchy: bool = False
    uniform_transitions: bool = False
    threads: int = 1

    def hier_config(self) -> HierConfig:
        return HierConfig(
            svm=TrainConfig(C=self.c, tol=self.tol, seed=self.seed),
            structure=self.structure,
            min_freq=self.min_freq,
            alpha=self.alpha,
            strict_hierarchy=self.strict_hierarchy,
            uniform_transitions=self.uniform_transitions,
        )


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dialogue-acts",
        description="Two-layer hierarchical dialogue act classifier")
    sub = parser.add_subparsers(dest="command")

    def add(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--dump-config", action="store_true",
                       help="print the effective run configuration and exit")
        p.add_argument("--corpus")
        p.add_argument("--schema")
        p.add_argument("--model")
        p.add_argument("--cues")
        p.add_argument("--verbs")
        p.add_argument("--grammar")
        p.add_argument("--output")
        p.add_argument("--c", type=float)
        p.add_argument("--tol", type=float)
        p.add_argument("--alpha", type=float)
        p.add_argument("--min-freq", type=int, dest="min_freq")
        p.add_argument("--k", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--n-dialogues", type=int, dest="n_dialogues")
        p.add_argument("--noise", type=float)
        p.add_argument("--structure", choices=["ovo", "ova", "binary"])
        p.add_argument("--strict-hierarchy", action="store_const", const=True,
                       dest="strict_hierarchy")
        p.add_argument("--uniform-transitions", action="store_const", const=True,
                       dest="uniform_transitions")
        p.add_argument("--threads", type=int)
        p.add_argument("--repetitions", type=int, default=None)
        return p

    add("train", "train a model from a labeled corpus")
    add("predict", "label a corpus with a trained model")
    add("eval", "score a trained model on a labeled corpus")
    add("cv", "k-fold cross-validation on a labeled corpus")
    add("bench", "training-time benchmark across hierarchy structures")
    add("gen", "generate a synthetic labeled corpus from a grammar")
    return parser


def _effective_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig()
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read config file {args.config}: {exc}") from exc
        known = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = set(file_values) - known
        if unknown:
            raise DataError(f"unknown config keys: {sorted(unknown)}")
        config = dataclasses.replace(config, **file_values)
    overrides = {f.name: getattr(args, f.name)
                 for f in dataclasses.fields(RunConfig)
                 if getattr(args, f.name, None) is not None}
    return dataclasses.replace(config, **overrides)


def _load_schema(config: RunConfig) -> TagSchema:
    return load_schema(config.schema) if config.schema else default_schema()


def _load_corpus(config: RunConfig, schema: TagSchema) -> Corpus:
    if not config.corpus:
        raise UsageError("--corpus is required")
    try:
        return parse_corpus(Path(config.corpus), schema)
    except OSError as exc:
        raise DataError(str(exc)) from exc


def _lexicons(config: RunConfig) -> dict:
    kwargs = {}
    if config.cues:
        kwargs["cues"] = CueLexicon.from_file(config.cues)
    if config.verbs:
        kwargs["verbs"] = VerbLexicon.from_file(config.verbs)
    return kwargs


def _emit(text: str, config: RunConfig) -> None:
    if config.output:
        Path(config.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_train(config: RunConfig) -> None:
    schema = _load_schema(config)
    corpus = _load_corpus(config, schema)
    model = train_hierarchical(corpus, schema, config.hier_config(),
                               **_lexicons(config))
    out = config.output or config.model
    if not out:
        raise UsageError("train requires --output (or --model) for the model file")
    save_model(model, out)
    print(f"model written to {out}", file=sys.stderr)


def _require_model(config: RunConfig):
    if not config.model:
        raise UsageError("--model is required")
    try:
        return load_model(config.model)
    except OSError as exc:
        raise DataError(str(exc)) from exc


def _cmd_predict(config: RunConfig) -> None:
    model = _require_model(config)
    if config.schema:
        schema = load_schema(config.schema)
        if schema.hash() != model.schema.hash():
            raise DataError(
                f"schema mismatch: corpus schema {schema.hash()} vs "
                f"model schema {model.schema.hash()}")
    corpus = _load_corpus(config, model.schema)
    labeled = []
    for dialogue in corpus.dialogues:
        decoded = decode_dialogue(model, dialogue)
        it = iter(decoded)
        turns = []
        for turn in dialogue.turns:
            utts = []
            for utt in turn.utterances:
                dec = next(it)
                utts.append(Utterance(text=utt.text, speaker=utt.speaker,
                                      category=dec.category, act=dec.act,
                                      index_in_turn=utt.index_in_turn))
            turns.append(Turn(speaker=turn.speaker, utterances=tuple(utts)))
        labeled.append(Dialogue(id=dialogue.id, genre=dialogue.genre,
                                turns=tuple(turns)))
    _emit(serialize_corpus(Corpus(tuple(labeled), model.schema)), config)


def _cmd_eval(config: RunConfig) -> None:
    model = _require_model(config)
    corpus = _load_corpus(config, model.schema)
    cat_report, act_report, _, _ = evaluate_model(model, corpus)
    doc = {"category": cat_report.to_dict(), "act": act_report.to_dict()}
    _emit(json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=2) + "\n",
          config)
    print("category layer:\n" + cat_report.render(), file=sys.stderr)
    print("act layer:\n" + act_report.render(), file=sys.stderr)


def _cmd_cv(config: RunConfig) -> None:
    schema = _load_schema(config)
    corpus = _load_corpus(config, schema)
    report = cross_validate(corpus, config.k, config.hier_config(),
                            seed=config.seed, threads=config.threads,
                            **_lexicons(config))
    _emit(json.dumps(report.to_dict(), sort_keys=True, ensure_ascii=False,
                     indent=2) + "\n", config)
    print("pooled category layer:\n" + report.pooled_category.render(),
          file=sys.stderr)
    print("pooled act layer:\n" + report.pooled_act.render(), file=sys.stderr)


def _cmd_bench(config: RunConfig, repetitions: int | None) -> None:
    schema = _load_schema(config)
    corpus = _load_corpus(config, schema)
    reports = benchmark_structures(corpus, config.hier_config(),
                                   repetitions=repetitions or 1,
                                   **_lexicons(config))
    _emit(json.dumps([r.to_dict() for r in reports], sort_keys=True,
                     indent=2) + "\n", config)
    print(render_timing(reports), file=sys.stderr)


def _cmd_gen(config: RunConfig) -> None:
    schema = _load_schema(config)
    grammar = load_grammar(config.grammar) if config.grammar else default_grammar()
    gen_config = GeneratorConfig(seed=config.seed, n_dialogues=config.n_dialogues,
                                 noise_rate=config.noise)
    corpus = generate_corpus(gen_config, schema, grammar)
    _emit(serialize_corpus(corpus), config)


def run(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        config = _effective_config(args)
        if args.dump_config:
            print(json.dumps(dataclasses.asdict(config), sort_keys=True, indent=2))
            return 0
        if args.command == "train":
            _cmd_train(config)
        elif args.command == "predict":
            _cmd_predict(config)
        elif args.command == "eval":
            _cmd_eval(config)
        elif args.command == "cv":
            _cmd_cv(config)
        elif args.command == "bench":
            _cmd_bench(config, args.repetitions)
        elif args.command == "gen":
            _cmd_gen(config)
        else:
            raise UsageError(f"unknown subcommand {args.command!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DataError, CorpusError, SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
