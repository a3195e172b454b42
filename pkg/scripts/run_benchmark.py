#!/usr/bin/env python3
"""Training-time benchmark of the three hierarchy structures on one corpus.

Example:
    python scripts/run_benchmark.py --n-dialogues 120 --repetitions 3
"""

import argparse
import sys

from dialogue_acts.corpus import default_schema
from dialogue_acts.evaluation import benchmark_structures, render_timing
from dialogue_acts.hierarchy import HierConfig
from dialogue_acts.synth import GeneratorConfig, generate_corpus


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-dialogues", type=int, default=120)
    ap.add_argument("--noise", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repetitions", type=int, default=3)
    args = ap.parse_args()

    schema = default_schema()
    corpus = generate_corpus(
        GeneratorConfig(seed=args.seed, n_dialogues=args.n_dialogues,
                        noise_rate=args.noise), schema)
    reports = benchmark_structures(corpus, HierConfig(),
                                   repetitions=args.repetitions)
    print(f"corpus: {len(corpus.dialogues)} dialogues, "
          f"{corpus.n_utterances} utterances "
          f"(fingerprint {corpus.fingerprint()})")
    print(render_timing(reports))
    by_structure = {r.structure: r.train_seconds for r in reports}
    ratio = by_structure["ovo"] / by_structure["binary"]
    print(f"one-vs-one / binary-ensemble time ratio: {ratio:.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
