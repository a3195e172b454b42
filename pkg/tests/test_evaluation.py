import random

import numpy as np
import pytest

from dialogue_acts.evaluation import (ConfusionMatrix, benchmark_structures,
                                      confusion, cross_domain, cross_validate,
                                      evaluate_model, render_timing,
                                      render_transfer_table, scores)
from dialogue_acts.hierarchy import HierConfig, train_hierarchical
from dialogue_acts.svm import TrainConfig
from dialogue_acts.synth import (GeneratorConfig, default_grammar,
                                 derive_genre_grammar, generate_corpus)

FAST_SVM = TrainConfig(C=1.0, tol=1e-3, max_passes=3, seed=0)
FAST = HierConfig(svm=FAST_SVM)

LABELS = ("a", "b", "c")


def test_confusion_counts():
    cm = confusion(["a", "a", "b"], ["a", "b", "b"], LABELS)
    assert cm.counts.tolist() == [[1, 1, 0], [0, 1, 0], [0, 0, 0]]
    assert cm.total == 3


def test_confusion_rejects_unknown_labels():
    with pytest.raises(ValueError, match="unknown gold"):
        confusion(["z"], ["a"], LABELS)
    with pytest.raises(ValueError, match="unknown predicted"):
        confusion(["a"], ["z"], LABELS)
    with pytest.raises(ValueError):
        confusion(["a", "a"], ["a"], LABELS)


def test_scores_hand_example():
    # gold (a,a,a,b,b,c), pred (a,a,b,b,c,c), computed by hand:
    #   a: P=1,   R=2/3, F=0.8
    #   b: P=1/2, R=1/2, F=0.5
    #   c: P=1/2, R=1,   F=2/3
    # macro-F = 0.655556, weighted-F (3,2,1 support) = 0.677778
    cm = confusion(list("aaabbc"), list("aabbcc"), LABELS)
    rep = scores(cm)
    assert rep.per_class["a"].precision == pytest.approx(1.0)
    assert rep.per_class["a"].recall == pytest.approx(2 / 3)
    assert rep.per_class["a"].f1 == pytest.approx(0.8)
    assert rep.per_class["b"].f1 == pytest.approx(0.5)
    assert rep.per_class["c"].f1 == pytest.approx(2 / 3)
    assert rep.macro_f == pytest.approx(0.655556, abs=1e-6)
    assert rep.weighted_f == pytest.approx(0.677778, abs=1e-6)
    assert rep.per_class["a"].support == 3


def test_scores_zero_denominators():
    # class c never appears at all: P=R=F=0, excluded from macro
    cm = confusion(["a", "b"], ["a", "b"], LABELS)
    rep = scores(cm)
    assert rep.per_class["c"].f1 == 0.0
    assert rep.per_class["c"].support == 0
    assert rep.macro_f == pytest.approx(1.0)


def test_weighted_f_equals_accuracy_when_perfect():
    gold = list("aabbbc")
    rep = scores(confusion(gold, gold, LABELS))
    assert rep.macro_f == pytest.approx(1.0)
    assert rep.weighted_f == pytest.approx(1.0)


def test_scores_permutation_invariant():
    gold = list("aaabbcabc")
    pred = list("aabbccbca")
    pairs = list(zip(gold, pred))
    rng = random.Random(3)
    rng.shuffle(pairs)
    g2, p2 = zip(*pairs)
    a = scores(confusion(gold, pred, LABELS))
    b = scores(confusion(list(g2), list(p2), LABELS))
    assert a == b


def test_confusion_addition_is_pooling():
    g1, p1 = list("aab"), list("abb")
    g2, p2 = list("bcc"), list("bcb")
    pooled = confusion(g1 + g2, p1 + p2, LABELS)
    summed = confusion(g1, p1, LABELS) + confusion(g2, p2, LABELS)
    assert np.array_equal(pooled.counts, summed.counts)
    assert scores(pooled) == scores(summed)


def test_confusion_add_rejects_label_mismatch():
    with pytest.raises(ValueError):
        confusion(["a"], ["a"], ("a", "b")) + confusion(["a"], ["a"], LABELS)


def test_report_render():
    rep = scores(confusion(list("aaabbc"), list("aabbcc"), LABELS))
    text = rep.render()
    assert "macro-F" in text
    assert "0.6556" in text
    assert "0.6778" in text


# --- end-to-end harness -----------------------------------------------------


@pytest.fixture(scope="module")
def synth_corpus(schema):
    return generate_corpus(GeneratorConfig(seed=11, n_dialogues=12), schema)


def test_evaluate_model_training_fit(synth_corpus, schema):
    model = train_hierarchical(synth_corpus, schema, FAST)
    cat_rep, act_rep, cat_cm, act_cm = evaluate_model(model, synth_corpus)
    assert cat_rep.n_utterances == synth_corpus.n_utterances
    assert act_cm.total == synth_corpus.n_utterances
    # noise-free templates are separable: strong training fit even with the
    # fast low-pass SMO budget used in tests
    assert cat_rep.macro_f > 0.9
    assert act_rep.macro_f > 0.8
    assert act_rep.weighted_f > 0.9
    assert 0.0 <= act_rep.incoherence_rate <= 1.0


def test_cross_validate_accounting(synth_corpus):
    report = cross_validate(synth_corpus, k=3, config=FAST, seed=5)
    assert report.k == 3
    assert len(report.per_fold_act) == 3
    # every utterance is held out exactly once
    assert report.pooled_act.n_utterances == synth_corpus.n_utterances
    per_fold_total = sum(r.n_utterances for r in report.per_fold_act)
    assert per_fold_total == synth_corpus.n_utterances
    # pooled confusion equals the sum of the per-fold confusions
    summed = report.per_fold_act_cm[0]
    for cm in report.per_fold_act_cm[1:]:
        summed = summed + cm
    assert np.array_equal(report.pooled_act_cm.counts, summed.counts)


def test_cross_validate_deterministic_and_threaded(synth_corpus):
    a = cross_validate(synth_corpus, k=3, config=FAST, seed=5)
    b = cross_validate(synth_corpus, k=3, config=FAST, seed=5)
    c = cross_validate(synth_corpus, k=3, config=FAST, seed=5, threads=3)
    assert a.to_dict() == b.to_dict()
    assert a.to_dict() == c.to_dict()


def test_cross_domain(schema):
    base = default_grammar()
    other = derive_genre_grammar(base, vocab_overlap=0.7, seed=0, suffix="_x")
    train = generate_corpus(GeneratorConfig(seed=1, n_dialogues=10,
                                            id_prefix="tr"), schema, base)
    test = generate_corpus(GeneratorConfig(seed=2, n_dialogues=6,
                                           id_prefix="te"), schema, other)
    cat_rep, act_rep = cross_domain(train, test, FAST)
    assert cat_rep.n_utterances == test.n_utterances
    assert 0.0 <= act_rep.macro_f <= 1.0


def test_cross_domain_rejects_shared_ids(schema):
    a = generate_corpus(GeneratorConfig(seed=1, n_dialogues=4), schema)
    b = generate_corpus(GeneratorConfig(seed=2, n_dialogues=4), schema)
    with pytest.raises(ValueError, match="shared"):
        cross_domain(a, b, FAST)


def test_transfer_table_render():
    table = render_transfer_table({("bank", "bank"): 0.81,
                                   ("bank", "flight"): 0.6521,
                                   ("flight", "flight"): 0.77})
    assert "train / test" in table
    assert "0.6521" in table
    assert "--" in table  # flight -> bank was not run


def test_benchmark_structures(synth_corpus):
    reports = benchmark_structures(synth_corpus, FAST, repetitions=1)
    assert [r.structure for r in reports] == ["binary", "ovo", "ova"]
    assert all(r.train_seconds > 0 for r in reports)
    assert len({r.dataset_fingerprint for r in reports}) == 1
    text = render_timing(reports)
    assert "one-vs-one" in text and "binary ensembles" in text
    with pytest.raises(ValueError):
        benchmark_structures(synth_corpus, FAST, repetitions=0)
