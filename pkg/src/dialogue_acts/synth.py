"""Deterministic synthetic corpus generation from an act template grammar.

Dialogues are random walks over a transition sketch starting at START and
ending at an act with no outgoing edges. Utterance text comes from per-act
templates with slot substitution; a configurable fraction of utterances get
one random token swapped in as noise. This exists purely as a reproducible,
license-free test bed for the pipeline.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Corpus, Dialogue, Genre, SpeakerRole, TagSchema, Turn, Utterance

START = "<START>"


@dataclass
class Grammar:
    acts: dict[str, dict]  # act -> {"role": ..., "templates": [...]}
    transitions: dict[str, list[tuple[str, float]]]
    slots: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.acts:
            raise ValueError("empty grammar")
        for act, spec in self.acts.items():
            if not spec.get("templates"):
                raise ValueError(f"act {act!r} has no templates")
            if spec.get("role") not in ("operator", "customer"):
                raise ValueError(f"act {act!r} has invalid role")
        for src, edges in self.transitions.items():
            for dst, weight in edges:
                if weight <= 0:
                    raise ValueError(f"non-positive weight on {src!r}->{dst!r}")
                if dst not in self.acts:
                    raise ValueError(f"transition target {dst!r} not in grammar")
        unreachable = set(self.acts) - self._reachable()
        if unreachable:
            raise ValueError(f"acts unreachable from START: {sorted(unreachable)}")

    def _reachable(self) -> set[str]:
        seen: set[str] = set()
        frontier = [START]
        while frontier:
            node = frontier.pop()
            for dst, _ in self.transitions.get(node, []):
                if dst not in seen:
                    seen.add(dst)
                    frontier.append(dst)
        return seen

    @classmethod
    def from_dict(cls, data: dict) -> "Grammar":
        transitions = {src: [(dst, float(w)) for dst, w in edges]
                       for src, edges in data["transitions"].items()}
        return cls(acts=data["acts"], transitions=transitions,
                   slots=data.get("slots", {}))

    def vocabulary(self) -> list[str]:
        """All distinct non-slot tokens in templates and slot fillers, sorted."""
        words: set[str] = set()
        for spec in self.acts.values():
            for template in spec["templates"]:
                for token in template.split():
                    if not (token.startswith("{") and token.endswith("}")):
                        words.add(token)
        for fillers in self.slots.values():
            words.update(fillers)
        return sorted(words)


def load_grammar(path: str | Path) -> Grammar:
    with open(path, encoding="utf-8") as fh:
        return Grammar.from_dict(json.load(fh))


def default_grammar() -> Grammar:
    return load_grammar(Path(__file__).parent / "data" / "grammar.json")


@dataclass
class GeneratorConfig:
    seed: int = 0
    n_dialogues: int = 200
    noise_rate: float = 0.0
    genre: Genre = Genre.SYNTHETIC
    id_prefix: str = "syn"
    max_utterances: int = 40

    def __post_init__(self):
        if not 0.0 <= self.noise_rate < 1.0:
            raise ValueError("noise_rate must be in [0, 1)")


def _walk_acts(grammar: Grammar, rng: random.Random, max_utterances: int) -> list[str]:
    acts: list[str] = []
    node = START
    while len(acts) < max_utterances:
        edges = grammar.transitions.get(node, [])
        if not edges:
            break
        targets = [dst for dst, _ in edges]
        weights = [w for _, w in edges]
        node = rng.choices(targets, weights=weights, k=1)[0]
        acts.append(node)
    return acts


def _fill_template(template: str, slots: dict[str, list[str]],
                   rng: random.Random) -> str:
    tokens = []
    for token in template.split():
        if token.startswith("{") and token.endswith("}"):
            tokens.append(rng.choice(slots[token[1:-1]]))
        else:
            tokens.append(token)
    return " ".join(tokens)


def generate_corpus(config: GeneratorConfig, schema: TagSchema,
                    grammar: Grammar | None = None) -> Corpus:
    """Sample a fully labeled corpus; deterministic per seed."""
    grammar = grammar or default_grammar()
    for act in grammar.acts:
        if act not in schema.category_of:
            raise ValueError(f"grammar act {act!r} not in schema")
    vocab = grammar.vocabulary()
    dialogues = []
    for i in range(config.n_dialogues):
        rng = random.Random(f"{config.seed}:{i}")
        acts = _walk_acts(grammar, rng, config.max_utterances)
        utterances: list[tuple[SpeakerRole, Utterance]] = []
        for act in acts:
            spec = grammar.acts[act]
            role = SpeakerRole(spec["role"])
            text = _fill_template(rng.choice(spec["templates"]), grammar.slots, rng)
            if config.noise_rate > 0 and rng.random() < config.noise_rate:
                words = text.split()
                words[rng.randrange(len(words))] = rng.choice(vocab)
                text = " ".join(words)
            utterances.append((role, Utterance(
                text=text, speaker=role, category=schema.category_of[act],
                act=act)))
        # merge consecutive same-role utterances into turns
        turns: list[Turn] = []
        current: list[Utterance] = []
        current_role: SpeakerRole | None = None
        for role, utt in utterances:
            if role != current_role and current:
                turns.append(Turn(speaker=current_role, utterances=tuple(current)))
                current = []
            current_role = role
            current.append(Utterance(text=utt.text, speaker=role,
                                     category=utt.category, act=utt.act,
                                     index_in_turn=len(current)))
        if current:
            turns.append(Turn(speaker=current_role, utterances=tuple(current)))
        dialogues.append(Dialogue(id=f"{config.id_prefix}-{i:04d}",
                                  genre=config.genre, turns=tuple(turns)))
    return Corpus(dialogues=tuple(dialogues), schema=schema)


def derive_genre_grammar(grammar: Grammar, vocab_overlap: float, seed: int,
                         suffix: str) -> Grammar:
    """Genre variant sharing roughly vocab_overlap of the surface vocabulary.

    Each distinct template/slot word is independently rewritten to a
    genre-specific form with probability (1 - vocab_overlap).
    """
    if not 0.0 <= vocab_overlap <= 1.0:
        raise ValueError("vocab_overlap must be in [0, 1]")
    rng = random.Random(f"genre:{seed}:{suffix}")
    mapping = {}
    for word in grammar.vocabulary():
        mapping[word] = f"{word}{suffix}" if rng.random() >= vocab_overlap else word

    def rewrite(template: str) -> str:
        return " ".join(
            tok if tok.startswith("{") and tok.endswith("}") else mapping[tok]
            for tok in template.split())

    acts = {act: {"role": spec["role"],
                  "templates": [rewrite(t) for t in spec["templates"]]}
            for act, spec in grammar.acts.items()}
    slots = {name: [mapping[w] for w in fillers]
             for name, fillers in grammar.slots.items()}
    return Grammar(acts=acts, transitions=grammar.transitions, slots=slots)
