"""Two-layer hierarchical dialogue act classifier for inquiry-answer dialogues."""

from .corpus import (Corpus, CorpusError, Dialogue, FoldAssignment, Genre,
                     SchemaError, SpeakerRole, TagSchema, Turn, Utterance,
                     Violation, default_schema, load_schema, parse_corpus,
                     serialize_corpus, split_folds, validate_corpus)
from .features import (ContextState, CueLexicon, ExtractorConfig,
                       FeatureExtractor, FeatureVector, FirstVerbType, Layer,
                       LexiconPosTagger, Token, VerbLexicon, Vocabulary,
                       build_vocabulary, first_verb_type, tokenize)
from .hierarchy import (DecodedUtterance, HierarchicalModel, HierConfig,
                        TransitionMatrix, classify_utterance, decode_dialogue,
                        estimate_transitions, load_model, save_model,
                        train_hierarchical)
from .multiclass import (BinaryEnsembleModel, ClassDistribution, OvaModel,
                         OvoModel, pairwise_coupling, predict_distribution,
                         train_binary_ensemble, train_one_vs_all,
                         train_one_vs_one)
from .normalize import NormalizationOptions, normalize_text
from .svm import (BinarySvmModel, TrainConfig, decision_value, fit_platt,
                  posterior, train_smo)
from .synth import (GeneratorConfig, Grammar, default_grammar,
                    derive_genre_grammar, generate_corpus, load_grammar)
from .evaluation import (ConfusionMatrix, CvReport, EvalReport, TimingReport,
                         benchmark_structures, confusion, cross_domain,
                         cross_validate, evaluate_model, render_timing,
                         render_transfer_table, scores)

__all__ = [name for name in dir() if not name.startswith("_")]
