"""The whole pipeline end to end on a synthetic ambiguous word, then a
small sweep over the number of topics.

A pseudo-word "crane.n" gets three planted senses (bird, machine,
stretch-your-neck verb-ish contexts), each with its own vocabulary plus a
shared drizzle of noise words.  Because we generated the senses, we also
hold the gold key, so the run can score itself honestly.

Run with:  python3 demos/05_full_run.py
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from senseforge import LdaConfig, RunConfig, run_all, sweep_k

SENSES = {
    "bird": "marsh nest wings flock feathers migration wading beak".split(),
    "machine": "crate hoist cable tower load steel operator boom".split(),
    "neck": "peer stretch crowd glimpse tiptoe strain curious stare".split(),
}
NOISE = "today nearby quietly large old".split()

rng = np.random.default_rng(20)


def context(words, doc_len=25, noise_rate=0.1):
    pick = lambda pool: str(pool[rng.integers(len(pool))])
    return " ".join(
        pick(NOISE) if rng.random() < noise_rate else pick(words)
        for _ in range(doc_len)
    )


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    corpus = tmp / "corpus.jsonl"
    gold = tmp / "gold.key"
    out = tmp / "out"

    with open(corpus, "w") as corpus_fh, open(gold, "w") as gold_fh:
        i = 0
        for sense, words in SENSES.items():
            for _ in range(25):
                iid = f"crane.n.{i}"
                i += 1
                record = {"target": "crane.n", "id": iid, "text": context(words)}
                corpus_fh.write(json.dumps(record) + "\n")
                gold_fh.write(f"crane.n {iid} crane.n.{sense}\n")
    print(f"wrote {i} instances of crane.n with {len(SENSES)} planted senses")

    config = RunConfig(
        test_corpus=str(corpus),
        gold_key=str(gold),
        clusters="gold",  # one cluster per gold sense
        lda=LdaConfig(n_topics=20, train_iters=400, seed=5),
        out_dir=str(out),
    )
    report = run_all(config)

    print("\n== scores ==")
    print(report.tsv(), end="")

    entry = report.to_json_dict()["targets"]["crane.n"]
    print(f"\ntrained on {entry['n_train_docs']} docs, "
          f"clustered into {entry['n_clusters']} senses")

    print("\n== cluster vs sense table ==")
    print((out / "contingency.txt").read_text(), end="")

    print("\n== files an experiment leaves behind ==")
    for path in sorted(out.rglob("*")):
        if path.is_file():
            print(f"  {path.relative_to(out)}")

    # The K sweep retrains everything per candidate; with this much
    # structure even a handful of topics is enough, but K=2 has too few
    # degrees of freedom to separate three senses.
    print("\n== sweep over number of topics ==")
    sweep = sweep_k(config, [2, 10, 20])
    print(sweep.tsv(), end="")
    print(f"best K by V-measure: {sweep.best_k()}")

print("\ndone.")
