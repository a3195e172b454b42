"""Feature extraction: utterance + dialogue context -> sparse vector.

Feature blocks, in id order: word unigrams, word bigrams, POS n-grams,
utterance length, first-verb type, is-part-of-turn, speaker, previous
speaker, previous category, previous act, cue indicators, and (layer 2 only)
the current main category. Cue ids live in their own namespace appended after
everything else in the layer-1 range, so extending the cue file never
renumbers existing n-gram ids. The layer-2 vector restricted to the layer-1
id range is exactly the layer-1 vector.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Protocol

from .corpus import Corpus, SpeakerRole, TagSchema, Turn, Utterance
from .normalize import DEFAULT_OPTIONS, NormalizationOptions, normalize_text

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")

UNK_TAG = "UNK"


@dataclass(frozen=True)
class Token:
    surface: str
    position: int


def tokenize(text: str) -> list[Token]:
    """Whitespace split with punctuation detached as separate tokens."""
    return [Token(surface=m.group(), position=i)
            for i, m in enumerate(_TOKEN_RE.finditer(text))]


class PosTagger(Protocol):
    """Pluggable tagger; implementations must declare their tag inventory."""

    inventory: tuple[str, ...]

    def tag(self, words: list[str]) -> list[str]: ...


class LexiconPosTagger:
    """Lookup tagger: known words get their lexicon tag, the rest UNK."""

    def __init__(self, lexicon: dict[str, str] | None = None):
        self.lexicon = dict(lexicon or {})
        self.inventory = tuple(sorted(set(self.lexicon.values()) | {UNK_TAG}))

    def tag(self, words: list[str]) -> list[str]:
        return [self.lexicon.get(w, UNK_TAG) for w in words]


def _read_tagged_lines(path: str | Path) -> list[tuple[str, str]]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            word, tag = line.split()
            pairs.append((word, tag))
    return pairs


def load_pos_lexicon(path: str | Path) -> LexiconPosTagger:
    return LexiconPosTagger(dict(_read_tagged_lines(path)))


def default_pos_tagger() -> LexiconPosTagger:
    return load_pos_lexicon(Path(__file__).parent / "data" / "pos_lexicon.txt")


class FirstVerbType(Enum):
    ACTIVE = 0
    PASSIVE = 1
    NOT_APPLICABLE = 2
    UNDEFINED = 3


@dataclass(frozen=True)
class VerbLexicon:
    active: frozenset[str]
    passive: frozenset[str]

    @classmethod
    def from_file(cls, path: str | Path,
                  options: NormalizationOptions = DEFAULT_OPTIONS) -> "VerbLexicon":
        active, passive = set(), set()
        for word, tag in _read_tagged_lines(path):
            word = normalize_text(word, options)
            if tag == "active":
                active.add(word)
            elif tag == "passive":
                passive.add(word)
            else:
                raise ValueError(f"verb lexicon tag must be active|passive, got {tag!r}")
        return cls(frozenset(active), frozenset(passive))


def default_verb_lexicon() -> VerbLexicon:
    return VerbLexicon.from_file(Path(__file__).parent / "data" / "verbs.txt")


def first_verb_type(words: list[str], tags: list[str], verbs: VerbLexicon,
                    verb_tag: str = "VERB") -> FirstVerbType:
    """Voice of the first verb-tagged token, decided by the verb lexicon."""
    assert len(words) == len(tags)
    for word, tag in zip(words, tags):
        if tag != verb_tag:
            continue
        if word in verbs.passive:
            return FirstVerbType.PASSIVE
        if word in verbs.active:
            return FirstVerbType.ACTIVE
        return FirstVerbType.UNDEFINED
    return FirstVerbType.NOT_APPLICABLE


class CueLexicon:
    """Cue words/phrases with dense stable ids in file order."""

    def __init__(self, entries: list[str],
                 options: NormalizationOptions = DEFAULT_OPTIONS):
        normalized = []
        seen = set()
        for entry in entries:
            entry = normalize_text(entry, options)
            if entry and entry not in seen:
                seen.add(entry)
                normalized.append(entry)
        self.entries: tuple[str, ...] = tuple(normalized)

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def from_file(cls, path: str | Path,
                  options: NormalizationOptions = DEFAULT_OPTIONS) -> "CueLexicon":
        entries = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if line:
                    entries.append(line)
        return cls(entries, options)

    def match_ids(self, words: list[str]) -> list[int]:
        padded = " " + " ".join(words) + " "
        return [i for i, entry in enumerate(self.entries) if f" {entry} " in padded]


def default_cue_lexicon() -> CueLexicon:
    return CueLexicon.from_file(Path(__file__).parent / "data" / "cues.txt")


@dataclass(frozen=True)
class Vocabulary:
    """N-gram id maps; n-grams are space-joined strings. Frozen after build."""

    unigrams: dict[str, int]
    bigrams: dict[str, int]
    pos_ngrams: dict[str, int]
    frozen: bool = True

    @property
    def size(self) -> int:
        return len(self.unigrams) + len(self.bigrams) + len(self.pos_ngrams)


@dataclass(frozen=True)
class ContextState:
    """Predicted or gold labels of the previous utterance; empty when initial."""

    prev_act: str | None = None
    prev_category: str | None = None
    prev_speaker: SpeakerRole | None = None

    def __post_init__(self):
        present = [self.prev_act is not None, self.prev_category is not None,
                   self.prev_speaker is not None]
        if any(present) and not all(present):
            raise ValueError("context must be fully present or fully absent")

    @property
    def is_initial(self) -> bool:
        return self.prev_speaker is None


INITIAL_CONTEXT = ContextState()


@dataclass(frozen=True)
class FeatureVector:
    values: dict[int, float]
    dimension: int

    def restrict(self, dimension: int) -> "FeatureVector":
        return FeatureVector({i: v for i, v in self.values.items() if i < dimension},
                             dimension)


class Layer(Enum):
    L1 = 1
    L2 = 2


def ngrams(items: list[str], order: int) -> list[str]:
    return [" ".join(items[i:i + order]) for i in range(len(items) - order + 1)]


@dataclass
class ExtractorConfig:
    pos_ngram_orders: tuple[int, ...] = (1, 2)
    normalization: NormalizationOptions = field(default_factory=NormalizationOptions)


class FeatureExtractor:
    """Stateless once constructed; shares read-only lexicons across calls."""

    def __init__(self, schema: TagSchema, vocab: Vocabulary, cues: CueLexicon,
                 verbs: VerbLexicon, tagger: PosTagger,
                 config: ExtractorConfig | None = None):
        self.schema = schema
        self.vocab = vocab
        self.cues = cues
        self.verbs = verbs
        self.tagger = tagger
        self.config = config or ExtractorConfig()
        self._layout()

    def _layout(self) -> None:
        v = self.vocab
        self.off_unigrams = 0
        self.off_bigrams = len(v.unigrams)
        self.off_pos = self.off_bigrams + len(v.bigrams)
        self.off_length = self.off_pos + len(v.pos_ngrams)
        self.off_first_verb = self.off_length + 1
        self.off_part_of_turn = self.off_first_verb + 4
        self.off_speaker = self.off_part_of_turn + 1
        self.off_prev_speaker = self.off_speaker + 2
        self.off_prev_category = self.off_prev_speaker + 2
        self.off_prev_act = self.off_prev_category + len(self.schema.categories)
        self.off_cues = self.off_prev_act + len(self.schema.acts)
        self.l1_dimension = self.off_cues + len(self.cues)
        self.off_current_category = self.l1_dimension
        self.l2_dimension = self.l1_dimension + len(self.schema.categories)

    def dimension(self, layer: Layer) -> int:
        return self.l1_dimension if layer is Layer.L1 else self.l2_dimension

    def words(self, text: str) -> list[str]:
        normalized = normalize_text(text, self.config.normalization)
        return [t.surface for t in tokenize(normalized)]

    def extract(self, utt: Utterance, turn: Turn, ctx: ContextState,
                layer: Layer, predicted_category: str | None = None) -> FeatureVector:
        if layer is Layer.L2 and predicted_category is None:
            raise ValueError("layer-2 extraction requires the current category")
        words = self.words(utt.text)
        tags = self.tagger.tag(words)
        vals: dict[int, float] = {}

        for gram in set(words):
            fid = self.vocab.unigrams.get(gram)
            if fid is not None:
                vals[self.off_unigrams + fid] = 1.0
        for gram in set(ngrams(words, 2)):
            fid = self.vocab.bigrams.get(gram)
            if fid is not None:
                vals[self.off_bigrams + fid] = 1.0
        for order in self.config.pos_ngram_orders:
            for gram in set(ngrams(tags, order)):
                fid = self.vocab.pos_ngrams.get(gram)
                if fid is not None:
                    vals[self.off_pos + fid] = 1.0

        if words:
            vals[self.off_length] = float(len(words))
        fv = first_verb_type(words, tags, self.verbs)
        vals[self.off_first_verb + fv.value] = 1.0
        if len(turn.utterances) > 1:
            vals[self.off_part_of_turn] = 1.0
        vals[self.off_speaker + (0 if utt.speaker is SpeakerRole.OPERATOR else 1)] = 1.0

        if not ctx.is_initial:
            assert ctx.prev_speaker is not None
            vals[self.off_prev_speaker
                 + (0 if ctx.prev_speaker is SpeakerRole.OPERATOR else 1)] = 1.0
            if ctx.prev_category is not None:
                vals[self.off_prev_category
                     + self.schema.categories.index(ctx.prev_category)] = 1.0
            if ctx.prev_act is not None:
                vals[self.off_prev_act + self.schema.acts.index(ctx.prev_act)] = 1.0

        for cue_id in self.cues.match_ids(words):
            vals[self.off_cues + cue_id] = 1.0

        if layer is Layer.L2:
            vals[self.off_current_category
                 + self.schema.categories.index(predicted_category)] = 1.0
        return FeatureVector(vals, self.dimension(layer))

    def feature_name(self, fid: int) -> str:
        """Human-readable name for a feature id; test/debug aid."""
        if fid < self.off_bigrams:
            return f"uni:{_by_id(self.vocab.unigrams, fid - self.off_unigrams)}"
        if fid < self.off_pos:
            return f"bi:{_by_id(self.vocab.bigrams, fid - self.off_bigrams)}"
        if fid < self.off_length:
            return f"pos:{_by_id(self.vocab.pos_ngrams, fid - self.off_pos)}"
        if fid == self.off_length:
            return "length"
        if fid < self.off_part_of_turn:
            return f"first-verb:{FirstVerbType(fid - self.off_first_verb).name}"
        if fid == self.off_part_of_turn:
            return "part-of-turn"
        if fid < self.off_prev_speaker:
            return f"speaker:{('operator', 'customer')[fid - self.off_speaker]}"
        if fid < self.off_prev_category:
            return f"prev-speaker:{('operator', 'customer')[fid - self.off_prev_speaker]}"
        if fid < self.off_prev_act:
            return f"prev-category:{self.schema.categories[fid - self.off_prev_category]}"
        if fid < self.off_cues:
            return f"prev-act:{self.schema.acts[fid - self.off_prev_act]}"
        if fid < self.l1_dimension:
            return f"cue:{self.cues.entries[fid - self.off_cues]}"
        return f"current-category:{self.schema.categories[fid - self.off_current_category]}"


def _by_id(mapping: dict[str, int], fid: int) -> str:
    for key, val in mapping.items():
        if val == fid:
            return key
    raise KeyError(fid)


def build_vocabulary(corpus: Corpus, min_freq: int = 1,
                     tagger: PosTagger | None = None,
                     config: ExtractorConfig | None = None) -> Vocabulary:
    """Count n-grams over the corpus and keep those with frequency >= min_freq.

    Ids are assigned lexicographically within each namespace so builds are
    reproducible regardless of corpus order.
    """
    if not corpus.dialogues:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    tagger = tagger or LexiconPosTagger()
    config = config or ExtractorConfig()
    uni: Counter[str] = Counter()
    bi: Counter[str] = Counter()
    pos: Counter[str] = Counter()
    for dialogue in corpus.dialogues:
        for _, utt in dialogue.utterances():
            normalized = normalize_text(utt.text, config.normalization)
            words = [t.surface for t in tokenize(normalized)]
            uni.update(words)
            bi.update(ngrams(words, 2))
            tags = tagger.tag(words)
            for order in config.pos_ngram_orders:
                pos.update(ngrams(tags, order))

    def keep(counter: Counter[str]) -> dict[str, int]:
        kept = sorted(g for g, c in counter.items() if c >= min_freq)
        return {g: i for i, g in enumerate(kept)}

    return Vocabulary(unigrams=keep(uni), bigrams=keep(bi), pos_ngrams=keep(pos))
