"""Tour of the corpus layer: tokenizing, vocabularies, and the two file
formats the rest of the toolkit consumes (JSONL corpora and key files).

Run with:  python3 demos/01_corpus_formats.py
"""

import tempfile
from pathlib import Path

from senseforge import (
    GoldStandard,
    build_vocabulary,
    encode_tokens,
    group_by_target,
    load_instances,
    load_key_file,
    tokenize,
    write_key_file,
)

# Tokenization is deliberately blunt: lowercase, keep runs of letters, drop
# everything else.  No stopwords, no stemming, so it works for any language
# that writes with letters.
print("== tokenize ==")
for text in (
    "The plant NEEDS water; the plant, by the river.",
    "Das Werk am Fluss — die Fabrik!",
    "numbers 123 and under_scores vanish",
):
    print(f"  {text!r}\n    -> {tokenize(text)}")

# A vocabulary is a word <-> integer bijection in first-seen order.
docs = [tokenize(t) for t in (
    "the plant needs water",
    "the plant closed early",
    "water the plant",
)]
vocab = build_vocabulary(docs)
print("\n== vocabulary ==")
print(f"  {len(vocab)} words: {vocab.words}")
print(f"  'plant' -> id {vocab.id_of('plant')}")

# Text becomes arrays of dense token ids; words outside the vocabulary are
# simply dropped (a trained model can say nothing about them anyway).
ids = encode_tokens(tokenize("The plant needs WATER, stat!"), vocab)
print(f"  encoded tokens: {ids.tolist()}")

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)

    # The corpus format is one JSON object per line with exactly the keys
    # target / id / text.  Targets are lemma.pos keys.
    corpus = tmp / "toy.jsonl"
    corpus.write_text(
        '{"target": "plant.n", "id": "plant.n.1", "text": "the plant needs water"}\n'
        '{"target": "plant.n", "id": "plant.n.2", "text": "the plant closed early"}\n'
        '{"target": "run.v", "id": "run.v.1", "text": "she went for a morning run"}\n'
    )
    instances = load_instances(corpus, "jsonl")
    by_target = group_by_target(instances)
    print("\n== JSONL corpus ==")
    for target, group in sorted(by_target.items()):
        print(f"  {target}: {len(group)} instances "
              f"({', '.join(inst.instance_id for inst in group)})")

    # Key files map instance ids to labels, one triple per line.  The same
    # format carries gold annotations and system output, so the scorer only
    # ever compares two key files.
    key = tmp / "toy.key"
    write_key_file(
        GoldStandard({
            "plant.n": {"plant.n.1": "plant.n.flora", "plant.n.2": "plant.n.factory"},
            "run.v": {"run.v.1": "run.v.jog"},
        }),
        key,
    )
    print("\n== key file ==")
    print(key.read_text(), end="")
    gold = load_key_file(key)
    print(f"  -> {len(gold)} labeled instances, "
          f"{gold.n_classes('plant.n')} senses for plant.n")

print("\ndone.")
