"""Scoring and experiment harness: per-class P/R/F, dialogue-level k-fold
cross-validation, cross-domain transfer, and the training-time benchmark
across hierarchy structures.

Reports render as JSON and as aligned plain-text tables (4 decimal places,
round-half-even via the float formatter).
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .corpus import Corpus, FoldAssignment, split_folds
from .hierarchy import HierConfig, HierarchicalModel, decode_dialogue, train_hierarchical


@dataclass(frozen=True)
class ConfusionMatrix:
    labels: tuple[str, ...]
    counts: np.ndarray  # gold rows x predicted columns

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        if self.labels != other.labels:
            raise ValueError("label sets differ")
        return ConfusionMatrix(self.labels, self.counts + other.counts)


def confusion(gold: list[str], pred: list[str],
              label_set: tuple[str, ...] | list[str]) -> ConfusionMatrix:
    if len(gold) != len(pred):
        raise ValueError(f"gold has {len(gold)} labels, pred has {len(pred)}")
    labels = tuple(label_set)
    index = {lbl: i for i, lbl in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=int)
    for g, p in zip(gold, pred):
        if g not in index:
            raise ValueError(f"unknown gold label {g!r}")
        if p not in index:
            raise ValueError(f"unknown predicted label {p!r}")
        counts[index[g], index[p]] += 1
    return ConfusionMatrix(labels=labels, counts=counts)


@dataclass(frozen=True)
class ClassScore:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    per_class: dict[str, ClassScore]
    macro_f: float
    weighted_f: float
    n_utterances: int
    incoherence_rate: float = 0.0

    def to_dict(self) -> dict:
        return {
            "per_class": {lbl: {"precision": s.precision, "recall": s.recall,
                                "f1": s.f1, "support": s.support}
                          for lbl, s in self.per_class.items()},
            "macro_f": self.macro_f,
            "weighted_f": self.weighted_f,
            "incoherence_rate": self.incoherence_rate,
            "n_utterances": self.n_utterances,
        }

    def render(self) -> str:
        width = max([len(lbl) for lbl in self.per_class] + [8])
        lines = [f"{'label':<{width}}  {'prec':>8}  {'recall':>8}  {'f1':>8}  {'support':>7}"]
        for lbl, s in self.per_class.items():
            lines.append(f"{lbl:<{width}}  {s.precision:>8.4f}  {s.recall:>8.4f}  "
                         f"{s.f1:>8.4f}  {s.support:>7d}")
        lines.append(f"{'macro-F':<{width}}  {self.macro_f:>8.4f}")
        lines.append(f"{'weighted-F':<{width}}  {self.weighted_f:>8.4f}")
        lines.append(f"{'incoherence':<{width}}  {self.incoherence_rate:>8.4f}")
        return "\n".join(lines)


def scores(cm: ConfusionMatrix, incoherence_rate: float = 0.0) -> EvalReport:
    """Per-class P/R/F with zero-denominator conventions; macro over classes
    with gold support; weighted-F weighted by gold support."""
    diag = np.diag(cm.counts).astype(float)
    col = cm.counts.sum(axis=0).astype(float)
    row = cm.counts.sum(axis=1).astype(float)
    per_class: dict[str, ClassScore] = {}
    fs, supports = [], []
    for i, lbl in enumerate(cm.labels):
        p = diag[i] / col[i] if col[i] > 0 else 0.0
        r = diag[i] / row[i] if row[i] > 0 else 0.0
        f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
        per_class[lbl] = ClassScore(precision=p, recall=r, f1=f1,
                                    support=int(row[i]))
        if row[i] > 0:
            fs.append(f1)
            supports.append(row[i])
    macro = float(np.mean(fs)) if fs else 0.0
    weighted = (float(np.average(fs, weights=supports)) if supports else 0.0)
    return EvalReport(per_class=per_class, macro_f=macro, weighted_f=weighted,
                      n_utterances=cm.total, incoherence_rate=incoherence_rate)


def _collect_predictions(model: HierarchicalModel, corpus: Corpus):
    gold_cat, gold_act, pred_cat, pred_act = [], [], [], []
    incoherent = 0
    for dialogue in corpus.dialogues:
        decoded = decode_dialogue(model, dialogue)
        for (_, utt), dec in zip(dialogue.utterances(), decoded):
            gold_cat.append(utt.category)
            gold_act.append(utt.act)
            pred_cat.append(dec.category)
            pred_act.append(dec.act)
            if model.schema.category_of[dec.act] != dec.category:
                incoherent += 1
    return gold_cat, gold_act, pred_cat, pred_act, incoherent


def evaluate_model(model: HierarchicalModel,
                   corpus: Corpus) -> tuple[EvalReport, EvalReport,
                                            ConfusionMatrix, ConfusionMatrix]:
    """Decode every dialogue with predicted context and score both layers."""
    gold_cat, gold_act, pred_cat, pred_act, incoherent = _collect_predictions(
        model, corpus)
    cat_cm = confusion(gold_cat, pred_cat, model.schema.categories)
    act_cm = confusion(gold_act, pred_act, model.schema.acts)
    rate = incoherent / len(gold_act) if gold_act else 0.0
    return (scores(cat_cm, rate), scores(act_cm, rate), cat_cm, act_cm)


@dataclass(frozen=True)
class CvReport:
    k: int
    seed: int
    folds: FoldAssignment
    per_fold_category: tuple[EvalReport, ...]
    per_fold_act: tuple[EvalReport, ...]
    pooled_category: EvalReport
    pooled_act: EvalReport
    pooled_category_cm: ConfusionMatrix
    pooled_act_cm: ConfusionMatrix
    per_fold_category_cm: tuple[ConfusionMatrix, ...] = ()
    per_fold_act_cm: tuple[ConfusionMatrix, ...] = ()

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "seed": self.seed,
            "per_fold": [{"fold": i, "category": c.to_dict(), "act": a.to_dict()}
                         for i, (c, a) in enumerate(
                             zip(self.per_fold_category, self.per_fold_act))],
            "pooled": {"category": self.pooled_category.to_dict(),
                       "act": self.pooled_act.to_dict()},
        }


def _subset(corpus: Corpus, ids: set[str]) -> Corpus:
    return Corpus(dialogues=tuple(d for d in corpus.dialogues if d.id in ids),
                  schema=corpus.schema)


def cross_validate(corpus: Corpus, k: int, config: HierConfig | None = None,
                   seed: int = 0, threads: int = 1, **train_kwargs) -> CvReport:
    """Dialogue-level k-fold CV; held-out dialogues decoded with predicted
    context; pooled report over all held-out predictions. Folds may run in
    parallel; results are collected in fold order, so output is identical."""
    config = config or HierConfig()
    folds = split_folds(corpus, k, seed)

    def run_fold(fold: int):
        held_ids = set(folds.dialogues_in_fold(fold))
        train_corpus = _subset(corpus, set(folds.fold_of) - held_ids)
        test_corpus = _subset(corpus, held_ids)
        try:
            model = train_hierarchical(train_corpus, corpus.schema, config,
                                       **train_kwargs)
        except Exception as exc:
            raise RuntimeError(f"training failed on fold {fold}: {exc}") from exc
        return _collect_predictions(model, test_corpus)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            fold_results = list(pool.map(run_fold, range(k)))
    else:
        fold_results = [run_fold(fold) for fold in range(k)]

    cat_reports, act_reports = [], []
    cat_cms, act_cms = [], []
    pooled = {"gold_cat": [], "gold_act": [], "pred_cat": [], "pred_act": [],
              "incoherent": 0}
    for gc, ga, pc, pa, inc in fold_results:
        cat_cm = confusion(gc, pc, corpus.schema.categories)
        act_cm = confusion(ga, pa, corpus.schema.acts)
        rate = inc / len(ga) if ga else 0.0
        cat_reports.append(scores(cat_cm, rate))
        act_reports.append(scores(act_cm, rate))
        cat_cms.append(cat_cm)
        act_cms.append(act_cm)
        pooled["gold_cat"] += gc
        pooled["gold_act"] += ga
        pooled["pred_cat"] += pc
        pooled["pred_act"] += pa
        pooled["incoherent"] += inc
    pooled_cat_cm = confusion(pooled["gold_cat"], pooled["pred_cat"],
                              corpus.schema.categories)
    pooled_act_cm = confusion(pooled["gold_act"], pooled["pred_act"],
                              corpus.schema.acts)
    rate = pooled["incoherent"] / len(pooled["gold_act"])
    return CvReport(k=k, seed=seed, folds=folds,
                    per_fold_category=tuple(cat_reports),
                    per_fold_act=tuple(act_reports),
                    pooled_category=scores(pooled_cat_cm, rate),
                    pooled_act=scores(pooled_act_cm, rate),
                    pooled_category_cm=pooled_cat_cm,
                    pooled_act_cm=pooled_act_cm,
                    per_fold_category_cm=tuple(cat_cms),
                    per_fold_act_cm=tuple(act_cms))


def cross_domain(train_corpus: Corpus, test_corpus: Corpus,
                 config: HierConfig | None = None,
                 **train_kwargs) -> tuple[EvalReport, EvalReport]:
    """Train on one corpus, decode another; returns (category, act) reports."""
    if train_corpus.schema.hash() != test_corpus.schema.hash():
        raise ValueError("train and test corpora use different schemas")
    train_ids = {d.id for d in train_corpus.dialogues}
    overlap = train_ids & {d.id for d in test_corpus.dialogues}
    if overlap:
        raise ValueError(f"dialogue ids shared between corpora: {sorted(overlap)[:3]}")
    model = train_hierarchical(train_corpus, train_corpus.schema, config,
                               **train_kwargs)
    cat_report, act_report, _, _ = evaluate_model(model, test_corpus)
    return cat_report, act_report


def render_transfer_table(results: dict[tuple[str, str], float]) -> str:
    """Train-rows x test-columns table of macro-F values."""
    trains = sorted({t for t, _ in results})
    tests = sorted({t for _, t in results})
    width = max([len(t) for t in trains] + [10])
    corner = "train / test"
    width = max(width, len(corner))
    header = f"{corner:<{width}}" + "".join(f"  {t:>10}" for t in tests)
    lines = [header]
    for tr in trains:
        cells = []
        for te in tests:
            value = results.get((tr, te))
            cells.append(f"  {'--':>10}" if value is None else f"  {value:>10.4f}")
        lines.append(f"{tr:<{width}}" + "".join(cells))
    return "\n".join(lines)


@dataclass(frozen=True)
class TimingReport:
    structure: str  # binary | ovo | ova
    train_seconds: float
    dataset_fingerprint: str

    def to_dict(self) -> dict:
        return {"structure": self.structure, "train_seconds": self.train_seconds,
                "dataset_fingerprint": self.dataset_fingerprint}


def benchmark_structures(corpus: Corpus, config: HierConfig | None = None,
                         repetitions: int = 1,
                         structures: tuple[str, ...] = ("binary", "ovo", "ova"),
                         **train_kwargs) -> list[TimingReport]:
    """Median wall-clock training time per hierarchy structure, same data and
    seeds. Single-threaded by construction."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    config = config or HierConfig()
    fingerprint = corpus.fingerprint()
    reports = []
    for structure in structures:
        cfg = replace(config, structure=structure)
        times = []
        for _ in range(repetitions):
            start = time.perf_counter()
            train_hierarchical(corpus, corpus.schema, cfg, **train_kwargs)
            times.append(time.perf_counter() - start)
        reports.append(TimingReport(structure=structure,
                                    train_seconds=statistics.median(times),
                                    dataset_fingerprint=fingerprint))
    return reports


def render_timing(reports: list[TimingReport]) -> str:
    names = {"binary": "Hierarchical (binary ensembles)",
             "ovo": "Hierarchical (one-vs-one)",
             "ova": "Hierarchical (one-vs-all)"}
    width = max(len(v) for v in names.values())
    lines = [f"{'structure':<{width}}  {'train seconds':>13}"]
    for rep in reports:
        lines.append(f"{names.get(rep.structure, rep.structure):<{width}}  "
                     f"{rep.train_seconds:>13.4f}")
    return "\n".join(lines)
