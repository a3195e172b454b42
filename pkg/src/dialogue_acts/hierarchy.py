"""Two-layer hierarchical classifier with sequential decoding.

Layer 1 predicts the main category from sentential + contextual features.
Layer 2 predicts the act over the full act inventory, with the predicted
current category added as a feature. Decoding multiplies the layer-2
posterior by an act-transition prior conditioned on the previously decoded
act (START for dialogue-initial utterances) and renormalizes.

Training uses gold context labels (teacher forcing); inference feeds each
utterance the predicted labels of its predecessor.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Corpus, Dialogue, SpeakerRole, TagSchema, Turn, Utterance
from .features import (ContextState, CueLexicon, ExtractorConfig,
                       FeatureExtractor, FeatureVector, Layer,
                       LexiconPosTagger, VerbLexicon, build_vocabulary,
                       default_cue_lexicon, default_pos_tagger,
                       default_verb_lexicon, Vocabulary)
from .multiclass import (BinaryEnsembleModel, ClassDistribution, OvaModel,
                         OvoModel, predict_distribution, train_binary_ensemble,
                         train_one_vs_all, train_one_vs_one)
from .normalize import NormalizationOptions
from .svm import BinarySvmModel, TrainConfig

FORMAT_VERSION = 1

START = "<START>"


@dataclass(frozen=True)
class TransitionMatrix:
    """P(act | previous act); columns indexed by previous act, last is START."""

    matrix: np.ndarray  # shape (n_acts, n_acts + 1), column-stochastic
    alpha: float

    def column(self, prev_act_index: int | None) -> np.ndarray:
        col = self.matrix.shape[1] - 1 if prev_act_index is None else prev_act_index
        return self.matrix[:, col]


def estimate_transitions(corpus: Corpus, schema: TagSchema,
                         alpha: float = 1.0) -> TransitionMatrix:
    """Add-alpha estimate of act transition probabilities.

    Counts cross turn boundaries in dialogue order; the first utterance of
    each dialogue is conditioned on START.
    """
    if alpha <= 0:
        raise ValueError("smoothing alpha must be positive")
    n = len(schema.acts)
    counts = np.zeros((n, n + 1))
    for dialogue in corpus.dialogues:
        prev_col = n  # START
        for _, utt in dialogue.utterances():
            if utt.act is None:
                raise ValueError(
                    f"unlabeled utterance in dialogue {dialogue.id!r}")
            act_idx = schema.acts.index(utt.act)
            counts[act_idx, prev_col] += 1
            prev_col = act_idx
    matrix = (counts + alpha) / (counts.sum(axis=0, keepdims=True) + alpha * n)
    return TransitionMatrix(matrix=matrix, alpha=alpha)


@dataclass
class HierConfig:
    svm: TrainConfig = field(default_factory=TrainConfig)
    structure: str = "ovo"  # ovo | ova | binary
    min_freq: int = 1
    alpha: float = 1.0
    strict_hierarchy: bool = False
    uniform_transitions: bool = False
    extractor: ExtractorConfig = field(default_factory=ExtractorConfig)

    def __post_init__(self):
        if self.structure not in ("ovo", "ova", "binary"):
            raise ValueError(f"unknown structure {self.structure!r}")


@dataclass(frozen=True)
class DecodedUtterance:
    category: str
    act: str
    category_dist: ClassDistribution  # over schema.categories
    act_dist: ClassDistribution  # over schema.acts, post-transition


@dataclass
class HierarchicalModel:
    schema: TagSchema
    vocab: Vocabulary
    cues: CueLexicon
    verbs: VerbLexicon
    tagger: LexiconPosTagger
    layer1: OvoModel | OvaModel | BinaryEnsembleModel
    layer2: OvoModel | OvaModel | BinaryEnsembleModel
    transitions: TransitionMatrix
    config: HierConfig

    def __post_init__(self):
        self.extractor = FeatureExtractor(self.schema, self.vocab, self.cues,
                                          self.verbs, self.tagger,
                                          self.config.extractor)
        # positions of the trained class labels inside the schema inventories
        self._cat_index = np.array([self.schema.categories.index(c)
                                    for c in self.layer1.class_labels])
        self._act_index = np.array([self.schema.acts.index(a)
                                    for a in self.layer2.class_labels])


def _embed(dist: ClassDistribution, index: np.ndarray, size: int) -> np.ndarray:
    full = np.zeros(size)
    full[index] = dist.probs
    return full


def _training_tables(corpus: Corpus, schema: TagSchema,
                     extractor: FeatureExtractor):
    """Feature vectors and labels for both layers, gold context throughout."""
    l1_vecs: list[FeatureVector] = []
    l2_vecs: list[FeatureVector] = []
    cat_labels: list[str] = []
    act_labels: list[str] = []
    for dialogue in corpus.dialogues:
        ctx = ContextState()
        for turn, utt in dialogue.utterances():
            if utt.act is None or utt.category is None:
                raise ValueError(
                    f"unlabeled utterance in dialogue {dialogue.id!r}; "
                    "training requires both category and act on every utterance")
            l1_vecs.append(extractor.extract(utt, turn, ctx, Layer.L1))
            l2_vecs.append(extractor.extract(utt, turn, ctx, Layer.L2,
                                             predicted_category=utt.category))
            cat_labels.append(utt.category)
            act_labels.append(utt.act)
            ctx = ContextState(prev_act=utt.act, prev_category=utt.category,
                               prev_speaker=utt.speaker)
    return l1_vecs, l2_vecs, cat_labels, act_labels


def _train_multiclass(vecs, label_names, inventory, structure, config):
    present = tuple(lbl for lbl in inventory if lbl in set(label_names))
    if len(present) < 2:
        raise ValueError(
            f"training data covers only {len(present)} class(es) of "
            f"{list(inventory)}; need at least 2")
    index = {lbl: i for i, lbl in enumerate(present)}
    y = [index[lbl] for lbl in label_names]
    trainers = {"ovo": train_one_vs_one, "ova": train_one_vs_all,
                "binary": train_binary_ensemble}
    return trainers[structure](vecs, y, len(present), present, config)


def train_hierarchical(corpus: Corpus, schema: TagSchema,
                       config: HierConfig | None = None,
                       cues: CueLexicon | None = None,
                       verbs: VerbLexicon | None = None,
                       tagger: LexiconPosTagger | None = None) -> HierarchicalModel:
    config = config or HierConfig()
    cues = cues if cues is not None else default_cue_lexicon()
    verbs = verbs if verbs is not None else default_verb_lexicon()
    tagger = tagger if tagger is not None else default_pos_tagger()

    vocab = build_vocabulary(corpus, config.min_freq, tagger, config.extractor)
    extractor = FeatureExtractor(schema, vocab, cues, verbs, tagger,
                                 config.extractor)
    l1_vecs, l2_vecs, cat_labels, act_labels = _training_tables(
        corpus, schema, extractor)

    missing_acts = sorted(set(schema.acts) - set(act_labels))
    if missing_acts:
        warnings.warn(
            f"schema acts absent from training data: {missing_acts}; "
            "the model cannot predict them reliably", stacklevel=2)

    layer1 = _train_multiclass(l1_vecs, cat_labels, schema.categories,
                               config.structure, config.svm)
    layer2 = _train_multiclass(l2_vecs, act_labels, schema.acts,
                               config.structure, config.svm)
    transitions = estimate_transitions(corpus, schema, config.alpha)
    return HierarchicalModel(schema=schema, vocab=vocab, cues=cues, verbs=verbs,
                             tagger=tagger, layer1=layer1, layer2=layer2,
                             transitions=transitions, config=config)


def classify_utterance(model: HierarchicalModel, utt: Utterance, turn: Turn,
                       ctx: ContextState) -> DecodedUtterance:
    schema = model.schema
    # layer 1: category
    l1_vec = model.extractor.extract(utt, turn, ctx, Layer.L1)
    cat_probs = _embed(predict_distribution(model.layer1, l1_vec),
                       model._cat_index, len(schema.categories))
    category = schema.categories[int(np.argmax(cat_probs))]

    # layer 2: act over the full inventory, predicted category as a feature
    l2_vec = model.extractor.extract(utt, turn, ctx, Layer.L2,
                                     predicted_category=category)
    act_probs = _embed(predict_distribution(model.layer2, l2_vec),
                       model._act_index, len(schema.acts))

    if model.config.strict_hierarchy:
        mask = np.array([schema.category_of[a] == category for a in schema.acts])
        if act_probs[mask].sum() > 0:
            act_probs = np.where(mask, act_probs, 0.0)
            act_probs = act_probs / act_probs.sum()

    if model.config.uniform_transitions:
        prior = np.full(len(schema.acts), 1.0 / len(schema.acts))
    else:
        prev_idx = (None if ctx.prev_act is None
                    else schema.acts.index(ctx.prev_act))
        prior = model.transitions.column(prev_idx)

    combined = act_probs * prior
    combined = combined / combined.sum()
    act = schema.acts[int(np.argmax(combined))]
    return DecodedUtterance(category=category, act=act,
                            category_dist=ClassDistribution(cat_probs),
                            act_dist=ClassDistribution(combined))


def decode_dialogue(model: HierarchicalModel, dialogue: Dialogue,
                    use_gold_context: bool = False) -> list[DecodedUtterance]:
    """Greedy left-to-right decode; context is built from predicted labels."""
    if dialogue.n_utterances == 0:
        raise ValueError(f"dialogue {dialogue.id!r} is empty")
    decoded: list[DecodedUtterance] = []
    ctx = ContextState()
    for turn, utt in dialogue.utterances():
        result = classify_utterance(model, utt, turn, ctx)
        decoded.append(result)
        if use_gold_context:
            if utt.act is None or utt.category is None:
                raise ValueError("gold-context decoding requires labels")
            ctx = ContextState(prev_act=utt.act, prev_category=utt.category,
                               prev_speaker=utt.speaker)
        else:
            ctx = ContextState(prev_act=result.act, prev_category=result.category,
                               prev_speaker=utt.speaker)
    return decoded


# --- serialization ---------------------------------------------------------


def _binary_to_dict(m: BinarySvmModel) -> dict:
    return {
        "weights": [float(w) for w in m.weights],
        "bias": m.bias,
        "alphas": {str(i): a for i, a in sorted(m.alphas.items())},
        "platt_a": m.platt_a,
        "platt_b": m.platt_b,
    }


def _binary_from_dict(d: dict) -> BinarySvmModel:
    return BinarySvmModel(weights=np.array(d["weights"], dtype=float),
                          bias=float(d["bias"]),
                          alphas={int(i): float(a) for i, a in d["alphas"].items()},
                          platt_a=d["platt_a"], platt_b=d["platt_b"])


def _multiclass_to_dict(m) -> dict:
    if isinstance(m, OvoModel):
        return {"kind": "ovo", "k": m.k, "class_labels": list(m.class_labels),
                "uniform_weights": m.uniform_weights,
                "pairs": [{"i": i, "j": j, "count": m.pair_counts[(i, j)],
                           "model": _binary_to_dict(member)}
                          for (i, j), member in sorted(m.pair_models.items())]}
    kind = "ova" if isinstance(m, OvaModel) else "binary"
    return {"kind": kind, "k": m.k, "class_labels": list(m.class_labels),
            "members": {str(i): _binary_to_dict(member)
                        for i, member in sorted(m.per_class_models.items())}}


def _multiclass_from_dict(d: dict):
    labels = tuple(d["class_labels"])
    if d["kind"] == "ovo":
        pair_models = {}
        pair_counts = {}
        for entry in d["pairs"]:
            key = (entry["i"], entry["j"])
            pair_models[key] = _binary_from_dict(entry["model"])
            pair_counts[key] = entry["count"]
        return OvoModel(k=d["k"], class_labels=labels, pair_models=pair_models,
                        pair_counts=pair_counts,
                        uniform_weights=d.get("uniform_weights", False))
    members = {int(i): _binary_from_dict(m) for i, m in d["members"].items()}
    cls = OvaModel if d["kind"] == "ova" else BinaryEnsembleModel
    return cls(k=d["k"], class_labels=labels, per_class_models=members)


def model_to_json(model: HierarchicalModel) -> str:
    doc = {
        "format_version": FORMAT_VERSION,
        "schema": model.schema.to_dict(),
        "schema_hash": model.schema.hash(),
        "vocab": {"unigrams": model.vocab.unigrams,
                  "bigrams": model.vocab.bigrams,
                  "pos_ngrams": model.vocab.pos_ngrams},
        "cues": list(model.cues.entries),
        "verbs": {"active": sorted(model.verbs.active),
                  "passive": sorted(model.verbs.passive)},
        "pos_lexicon": model.tagger.lexicon,
        "layer1": _multiclass_to_dict(model.layer1),
        "layer2": _multiclass_to_dict(model.layer2),
        "transitions": {"matrix": [[float(v) for v in row]
                                   for row in model.transitions.matrix],
                        "alpha": model.transitions.alpha},
        "config": {
            "svm": asdict(model.config.svm),
            "structure": model.config.structure,
            "min_freq": model.config.min_freq,
            "alpha": model.config.alpha,
            "strict_hierarchy": model.config.strict_hierarchy,
            "uniform_transitions": model.config.uniform_transitions,
            "extractor": {
                "pos_ngram_orders": list(model.config.extractor.pos_ngram_orders),
                "normalization": asdict(model.config.extractor.normalization),
            },
        },
    }
    return json.dumps(doc, sort_keys=True, ensure_ascii=False)


def model_from_json(text: str) -> HierarchicalModel:
    doc = json.loads(text)
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(
            f"unsupported model format_version {version!r}; expected {FORMAT_VERSION}")
    schema = TagSchema.from_dict(doc["schema"])
    vocab = Vocabulary(unigrams=doc["vocab"]["unigrams"],
                       bigrams=doc["vocab"]["bigrams"],
                       pos_ngrams=doc["vocab"]["pos_ngrams"])
    verbs = VerbLexicon(active=frozenset(doc["verbs"]["active"]),
                        passive=frozenset(doc["verbs"]["passive"]))
    tagger = LexiconPosTagger(doc["pos_lexicon"])
    cfg = doc["config"]
    config = HierConfig(
        svm=TrainConfig(**cfg["svm"]),
        structure=cfg["structure"],
        min_freq=cfg["min_freq"],
        alpha=cfg["alpha"],
        strict_hierarchy=cfg["strict_hierarchy"],
        uniform_transitions=cfg["uniform_transitions"],
        extractor=ExtractorConfig(
            pos_ngram_orders=tuple(cfg["extractor"]["pos_ngram_orders"]),
            normalization=NormalizationOptions(**cfg["extractor"]["normalization"])),
    )
    cues = CueLexicon(doc["cues"], config.extractor.normalization)
    transitions = TransitionMatrix(
        matrix=np.array(doc["transitions"]["matrix"], dtype=float),
        alpha=float(doc["transitions"]["alpha"]))
    return HierarchicalModel(schema=schema, vocab=vocab, cues=cues, verbs=verbs,
                             tagger=tagger,
                             layer1=_multiclass_from_dict(doc["layer1"]),
                             layer2=_multiclass_from_dict(doc["layer2"]),
                             transitions=transitions, config=config)


def save_model(model: HierarchicalModel, path: str | Path) -> None:
    Path(path).write_text(model_to_json(model), encoding="utf-8")


def load_model(path: str | Path) -> HierarchicalModel:
    return model_from_json(Path(path).read_text(encoding="utf-8"))
