"""Dialogue data model: schema, corpus parsing/serialization, validation, folds.

Corpus files are UTF-8 JSON Lines, one dialogue per line:

    {"id": str, "genre": "bank"|"flight"|"im"|"synthetic",
     "turns": [{"speaker": "operator"|"customer",
                "utterances": [{"text": str, "category": str?, "act": str?}]}]}

The tag schema lives in a separate JSON file:

    {"categories": [str], "acts": [{"name": str, "category": str}]}
"""

from __future__ import annotations

import hashlib
import io
import json
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator


class CorpusError(Exception):
    """Malformed corpus input; carries the offending line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(Exception):
    pass


class SpeakerRole(Enum):
    OPERATOR = "operator"
    CUSTOMER = "customer"


class Genre(Enum):
    BANK = "bank"
    FLIGHT = "flight"
    IM = "im"
    SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class Utterance:
    text: str
    speaker: SpeakerRole
    category: str | None = None
    act: str | None = None
    index_in_turn: int = 0


@dataclass(frozen=True)
class Turn:
    speaker: SpeakerRole
    utterances: tuple[Utterance, ...]


@dataclass(frozen=True)
class Dialogue:
    id: str
    genre: Genre
    turns: tuple[Turn, ...]

    def utterances(self) -> Iterator[tuple[Turn, Utterance]]:
        """All utterances in dialogue order, paired with their turn."""
        for turn in self.turns:
            for utt in turn.utterances:
                yield turn, utt

    @property
    def n_utterances(self) -> int:
        return sum(len(t.utterances) for t in self.turns)


@dataclass(frozen=True)
class TagSchema:
    categories: tuple[str, ...]
    acts: tuple[str, ...]
    category_of: dict[str, str]

    def __post_init__(self):
        if len(self.categories) < 2 or len(self.acts) < 2:
            raise SchemaError("schema needs at least 2 categories and 2 acts")
        if len(set(self.categories)) != len(self.categories):
            raise SchemaError("duplicate category labels")
        if len(set(self.acts)) != len(self.acts):
            raise SchemaError("duplicate act labels")
        for act in self.acts:
            cat = self.category_of.get(act)
            if cat is None:
                raise SchemaError(f"act {act!r} has no category")
            if cat not in self.categories:
                raise SchemaError(f"act {act!r} maps to unknown category {cat!r}")

    def acts_of(self, category: str) -> tuple[str, ...]:
        return tuple(a for a in self.acts if self.category_of[a] == category)

    def to_dict(self) -> dict:
        return {
            "categories": list(self.categories),
            "acts": [{"name": a, "category": self.category_of[a]} for a in self.acts],
        }

    def hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]

    @classmethod
    def from_dict(cls, data: dict) -> "TagSchema":
        try:
            categories = tuple(data["categories"])
            acts = tuple(a["name"] for a in data["acts"])
            category_of = {a["name"]: a["category"] for a in data["acts"]}
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed schema: {exc}") from exc
        return cls(categories, acts, category_of)


def load_schema(path: str | Path) -> TagSchema:
    with open(path, encoding="utf-8") as fh:
        return TagSchema.from_dict(json.load(fh))


def default_schema() -> TagSchema:
    return load_schema(Path(__file__).parent / "data" / "schema.json")


@dataclass(frozen=True)
class Corpus:
    dialogues: tuple[Dialogue, ...]
    schema: TagSchema

    @property
    def n_utterances(self) -> int:
        return sum(d.n_utterances for d in self.dialogues)

    def fingerprint(self) -> str:
        blob = serialize_corpus(self)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class Violation:
    dialogue_id: str
    turn_index: int
    utterance_index: int
    rule: str


# --- parsing ---------------------------------------------------------------


def _parse_utterance(raw: dict, speaker: SpeakerRole, index: int, line: int) -> Utterance:
    text = raw.get("text")
    if not isinstance(text, str) or not text.strip():
        raise CorpusError("empty utterance text", line)
    category = raw.get("category")
    act = raw.get("act")
    return Utterance(text=text, speaker=speaker, category=category, act=act,
                     index_in_turn=index)


def _parse_dialogue(raw: dict, schema: TagSchema, line: int) -> Dialogue:
    try:
        did = raw["id"]
        genre = Genre(raw["genre"])
        raw_turns = raw["turns"]
    except (KeyError, ValueError) as exc:
        raise CorpusError(f"malformed dialogue: {exc}", line) from exc
    if not raw_turns:
        raise CorpusError(f"dialogue {did!r} has no turns", line)
    turns = []
    for raw_turn in raw_turns:
        try:
            speaker = SpeakerRole(raw_turn["speaker"])
            raw_utts = raw_turn["utterances"]
        except (KeyError, ValueError) as exc:
            raise CorpusError(f"malformed turn in dialogue {did!r}: {exc}", line) from exc
        if not raw_utts:
            raise CorpusError(f"empty turn in dialogue {did!r}", line)
        utts = tuple(_parse_utterance(u, speaker, i, line) for i, u in enumerate(raw_utts))
        for utt in utts:
            if utt.act is not None and utt.act not in schema.category_of:
                raise CorpusError(f"unknown act {utt.act!r} in dialogue {did!r}", line)
            if utt.category is not None and utt.category not in schema.categories:
                raise CorpusError(
                    f"unknown category {utt.category!r} in dialogue {did!r}", line)
            if (utt.act is not None and utt.category is not None
                    and schema.category_of[utt.act] != utt.category):
                raise CorpusError(
                    f"act/category mismatch for act {utt.act!r} in dialogue {did!r}", line)
        turns.append(Turn(speaker=speaker, utterances=utts))
    return Dialogue(id=did, genre=genre, turns=tuple(turns))


def parse_corpus(stream: BinaryIO | Iterable[bytes] | str | Path,
                 schema: TagSchema) -> Corpus:
    """Parse JSON Lines into a validated Corpus.

    Accepts a byte stream or a filesystem path. Raises CorpusError with the
    line number of the first violation.
    """
    if isinstance(stream, (str, Path)):
        with open(stream, "rb") as fh:
            return parse_corpus(fh, schema)
    dialogues: list[Dialogue] = []
    seen: set[str] = set()
    for lineno, raw_line in enumerate(stream, start=1):
        line = raw_line.decode("utf-8") if isinstance(raw_line, bytes) else raw_line
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"invalid JSON: {exc.msg}", lineno) from exc
        dialogue = _parse_dialogue(data, schema, lineno)
        if dialogue.id in seen:
            raise CorpusError(f"duplicate dialogue id {dialogue.id!r}", lineno)
        seen.add(dialogue.id)
        dialogues.append(dialogue)
    return Corpus(dialogues=tuple(dialogues), schema=schema)


def serialize_corpus(corpus: Corpus) -> str:
    """Inverse of parse_corpus, one dialogue per line."""
    lines = []
    for d in corpus.dialogues:
        turns = []
        for t in d.turns:
            utts = []
            for u in t.utterances:
                rec: dict = {"text": u.text}
                if u.category is not None:
                    rec["category"] = u.category
                if u.act is not None:
                    rec["act"] = u.act
                utts.append(rec)
            turns.append({"speaker": t.speaker.value, "utterances": utts})
        lines.append(json.dumps({"id": d.id, "genre": d.genre.value, "turns": turns},
                                ensure_ascii=False, sort_keys=True))
    return "\n".join(lines) + ("\n" if lines else "")


# --- validation ------------------------------------------------------------


def validate_corpus(corpus: Corpus) -> list[Violation]:
    """Check every type invariant; violations are data, not failures."""
    violations: list[Violation] = []
    schema = corpus.schema
    seen_ids: set[str] = set()
    for d in corpus.dialogues:
        if d.id in seen_ids:
            violations.append(Violation(d.id, -1, -1, "duplicate-id"))
        seen_ids.add(d.id)
        if not d.turns:
            violations.append(Violation(d.id, -1, -1, "no-turns"))
        for ti, turn in enumerate(d.turns):
            if not turn.utterances:
                violations.append(Violation(d.id, ti, -1, "empty-turn"))
            for ui, utt in enumerate(turn.utterances):
                if not utt.text.strip():
                    violations.append(Violation(d.id, ti, ui, "empty-text"))
                if utt.speaker != turn.speaker:
                    violations.append(Violation(d.id, ti, ui, "speaker-mismatch"))
                if utt.index_in_turn != ui:
                    violations.append(Violation(d.id, ti, ui, "bad-index"))
                if utt.act is not None and utt.act not in schema.category_of:
                    violations.append(Violation(d.id, ti, ui, "unknown-act"))
                if utt.category is not None and utt.category not in schema.categories:
                    violations.append(Violation(d.id, ti, ui, "unknown-category"))
                if (utt.act is not None and utt.category is not None
                        and schema.category_of.get(utt.act) != utt.category):
                    violations.append(Violation(d.id, ti, ui, "act-category-mismatch"))
    return violations


# --- folds -----------------------------------------------------------------


@dataclass(frozen=True)
class FoldAssignment:
    k: int
    fold_of: dict[str, int]
    seed: int

    def dialogues_in_fold(self, fold: int) -> list[str]:
        return [d for d, f in self.fold_of.items() if f == fold]


def split_folds(corpus: Corpus, k: int, seed: int) -> FoldAssignment:
    """Dialogue-level k-fold partition, balanced within 1, deterministic per seed."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    ids = [d.id for d in corpus.dialogues]
    if len(ids) < k:
        raise ValueError(f"corpus has {len(ids)} dialogues, fewer than k={k}")
    rng = random.Random(seed)
    shuffled = list(ids)
    rng.shuffle(shuffled)
    fold_of = {did: i % k for i, did in enumerate(shuffled)}
    return FoldAssignment(k=k, fold_of=fold_of, seed=seed)
