"""How induced senses are scored against gold annotations.

Everything reduces to a contingency table: gold classes down the rows,
induced clusters across the columns.  From it come the entropy-based
scores (homogeneity, completeness, V-measure) and the paired F-score.
The interesting behavior is at the edges, where the two families of
scores pull in different directions.

Run with:  python3 demos/04_scoring.py
"""

import tempfile
from pathlib import Path

from senseforge import contingency, load_key_file, score_key_files, score_report

GOLD = {
    "i1": "flora", "i2": "flora", "i3": "flora",
    "i4": "factory", "i5": "factory", "i6": "factory",
}


def show(title, assignment):
    t = contingency(GOLD, assignment)
    s = score_report(t)
    print(f"== {title} ==")
    print(f"  table (classes x clusters):\n"
          + "\n".join(f"    {row.tolist()}" for row in t.a))
    print(f"  homogeneity {s.homogeneity:.3f}  completeness {s.completeness:.3f}  "
          f"v {s.v_measure:.3f}")
    print(f"  paired precision {s.paired_precision:.3f}  "
          f"recall {s.paired_recall:.3f}  f {s.f_score:.3f}\n")


# The system nails it: each cluster is one gold sense.
show("perfect", {"i1": 0, "i2": 0, "i3": 0, "i4": 1, "i5": 1, "i6": 1})

# Everything in one cluster.  Trivially complete (no sense is split) but
# not at all homogeneous; paired recall is perfect, precision poor.  The
# "most frequent sense" baseline looks like this.
show("one big cluster", {k: 0 for k in GOLD})

# Every instance alone.  Perfectly homogeneous, yet V stays low because
# completeness collapses; the paired scores have no co-clustered pairs at
# all, so precision is 0 by convention.
show("all singletons", {k: i for i, k in enumerate(GOLD)})

# An honest middling system: one mixed cluster.
show("one mistake", {"i1": 0, "i2": 0, "i3": 0, "i4": 0, "i5": 1, "i6": 1})

# The scorer itself compares two key files and aggregates per
# part-of-speech, weighting each instance equally.
with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    gold = tmp / "gold.key"
    system = tmp / "system.key"
    gold.write_text(
        "plant.n plant.n.1 flora\n"
        "plant.n plant.n.2 flora\n"
        "plant.n plant.n.3 factory\n"
        "run.v run.v.1 jog\n"
        "run.v run.v.2 manage\n"
    )
    system.write_text(
        "plant.n plant.n.1 plant.n.cluster0\n"
        "plant.n plant.n.2 plant.n.cluster0\n"
        "plant.n plant.n.3 plant.n.cluster1\n"
        "run.v run.v.1 run.v.cluster0\n"
        "run.v run.v.2 run.v.cluster0\n"
    )
    report = score_key_files(load_key_file(system), load_key_file(gold))
    print("== key file vs key file ==")
    for subset in ("all", "verbs", "nouns"):
        agg = report["aggregates"][subset]
        scores = agg["instance_weighted_percent"]
        print(f"  {subset:6s}: V {scores['v_measure']:.1f}  "
              f"F {scores['f_score']:.1f}  ({agg['n_instances']} instances)")

print("\ndone.")
