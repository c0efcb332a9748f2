import numpy as np
import pytest

from senseforge import (
    ContingencyTable,
    completeness,
    contingency,
    homogeneity,
    paired_f_score,
    pooled_table,
    score_report,
    v_measure,
)

from oracles import (
    entropy_scores,
    paired_scores_enumerated,
    table_to_labels,
)


def table(rows, **kwargs):
    a = np.asarray(rows, dtype=np.int64)
    return ContingencyTable(
        a,
        tuple(f"g{i}" for i in range(a.shape[0])),
        tuple(f"c{j}" for j in range(a.shape[1])),
        **kwargs,
    )


def random_tables(n_tables, max_side=10, max_n=1000, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n_tables:
        shape = (int(rng.integers(1, max_side + 1)), int(rng.integers(1, max_side + 1)))
        a = rng.integers(0, 12, size=shape)
        if a.sum() < 2 or a.sum() > max_n:
            continue
        out.append(table(a))
    return out


class TestContingency:
    def test_all_shared_single_cell(self):
        t = contingency({"x": "A", "y": "A"}, {"x": 0, "y": 0})
        assert t.a.tolist() == [[2]]
        assert t.n == 2 and t.n_excluded == 0

    def test_identity_two_by_two(self):
        t = contingency({"x": "A", "y": "B"}, {"x": 0, "y": 1})
        assert t.a.tolist() == [[1, 0], [0, 1]]

    def test_promotion_shaped_marginals(self):
        # 27 instances, 4 classes x 4 clusters
        counts = [[9, 1, 1, 1], [1, 6, 1, 0], [0, 1, 3, 0], [0, 0, 0, 3]]
        gold, system = {}, {}
        k = 0
        for i, row in enumerate(counts):
            for j, c in enumerate(row):
                for _ in range(c):
                    gold[f"i{k}"] = f"sense{i}"
                    system[f"i{k}"] = j
                    k += 1
        t = contingency(gold, system)
        assert t.n == 27
        assert t.class_sizes().tolist() == [12, 8, 4, 3]
        assert t.cluster_sizes().tolist() == [10, 8, 5, 4]

    def test_partial_overlap_counted_as_excluded(self):
        t = contingency({"x": "A", "y": "A", "z": "B"}, {"x": 0, "w": 1})
        assert t.n == 1
        assert t.n_excluded == 3  # y, z unclustered; w unlabeled

    def test_empty_overlap_raises(self):
        with pytest.raises(ValueError):
            contingency({"x": "A"}, {"y": 0})

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            table([[1, -1]])

    def test_shape_label_mismatch_rejected(self):
        with pytest.raises(ValueError):
            ContingencyTable(np.ones((2, 2), dtype=np.int64), ("g0",), ("c0", "c1"))

    def test_json_round_trip(self):
        t = table([[2, 1], [0, 3]], n_excluded=4)
        assert ContingencyTable.from_json_dict(t.to_json_dict()) == t

    def test_table_is_read_only(self):
        t = table([[1, 2]])
        with pytest.raises(ValueError):
            t.a[0, 0] = 5


class TestEntropyScores:
    def test_diagonal_is_perfect(self):
        t = table([[3, 0], [0, 2]])
        assert homogeneity(t) == 1.0
        assert completeness(t) == 1.0
        assert v_measure(t) == 1.0

    def test_single_cluster_multi_class(self):
        t = table([[2], [2]])
        assert homogeneity(t) == 0.0
        assert completeness(t) == 1.0
        assert v_measure(t) == 0.0

    def test_single_class_multi_cluster(self):
        t = table([[2, 2]])
        assert homogeneity(t) == 1.0
        assert completeness(t) == 0.0
        assert v_measure(t) == 0.0

    def test_perfectly_mixed(self):
        t = table([[1, 1], [1, 1]])
        assert homogeneity(t) == 0.0
        assert completeness(t) == 0.0
        assert v_measure(t) == 0.0

    def test_single_instance(self):
        t = table([[1]])
        assert v_measure(t) == 1.0

    def test_hand_checked_table(self):
        # values frozen from the independent entropy evaluator
        t = table([[2, 1], [0, 1]])
        assert homogeneity(t) == pytest.approx(0.3836885465963443, abs=1e-12)
        assert completeness(t) == pytest.approx(0.3112781244591327, abs=1e-12)
        assert v_measure(t) == pytest.approx(0.3437110184854507, abs=1e-12)

    def test_matches_oracle_on_random_tables(self):
        for t in random_tables(60, seed=5):
            gold, system = table_to_labels(t.a)
            hom, com, v = entropy_scores(gold, system)
            assert homogeneity(t) == pytest.approx(hom, abs=1e-12)
            assert completeness(t) == pytest.approx(com, abs=1e-12)
            assert v_measure(t) == pytest.approx(v, abs=1e-12)

    def test_completeness_is_homogeneity_of_transpose(self):
        for t in random_tables(40, seed=6):
            assert completeness(t) == homogeneity(t.transposed())

    def test_base_invariance(self):
        for t in random_tables(40, seed=7):
            assert homogeneity(t, base=2.0) == pytest.approx(
                homogeneity(t, base=np.e), abs=1e-12
            )
            assert v_measure(t, base=2.0) == pytest.approx(
                v_measure(t, base=np.e), abs=1e-12
            )

    def test_label_permutation_invariance(self):
        rng = np.random.default_rng(8)
        for t in random_tables(20, seed=9):
            perm_rows = rng.permutation(t.a.shape[0])
            perm_cols = rng.permutation(t.a.shape[1])
            shuffled = ContingencyTable(
                t.a[np.ix_(perm_rows, perm_cols)],
                tuple(t.class_labels[i] for i in perm_rows),
                tuple(t.cluster_labels[j] for j in perm_cols),
            )
            assert v_measure(shuffled) == pytest.approx(v_measure(t), abs=1e-12)

    def test_scores_stay_in_unit_interval(self):
        for t in random_tables(50, seed=10):
            for value in (homogeneity(t), completeness(t), v_measure(t)):
                assert 0.0 <= value <= 1.0


class TestPairedFScore:
    def test_diagonal_is_perfect(self):
        assert paired_f_score(table([[3, 0], [0, 2]])) == (1.0, 1.0, 1.0)

    def test_single_cluster_two_classes(self):
        # 6 cluster pairs, 2 class pairs, both correct inside the one cluster
        p, r, f = paired_f_score(table([[2], [2]]))
        assert p == pytest.approx(1 / 3)
        assert r == 1.0
        assert f == 0.5

    def test_all_singletons_has_zero_cluster_pairs(self):
        p, r, f = paired_f_score(table([[1, 0], [0, 1]]))
        assert (p, r, f) == (0.0, 0.0, 0.0)

    def test_requires_two_instances(self):
        with pytest.raises(ValueError):
            paired_f_score(table([[1]]))

    def test_matches_enumeration_on_small_random_tables(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            a = rng.integers(0, 4, size=(3, 3))
            if a.sum() < 2:
                continue
            t = table(a)
            gold, system = table_to_labels(a)
            assert paired_f_score(t) == paired_scores_enumerated(gold, system)

    def test_exact_on_large_counts(self):
        # pair counts overflow float64 precision around 2^53; stay integral
        t = table([[10**9, 1], [0, 10**9]])
        p, r, f = paired_f_score(t)
        assert 0.0 < p <= 1.0 and 0.0 < r <= 1.0 and 0.0 < f <= 1.0


class TestScoreReport:
    def test_report_fields_and_percent(self):
        rep = score_report(table([[2, 1], [0, 1]]))
        assert rep.v_measure == pytest.approx(0.3437110184854507, abs=1e-12)
        assert rep.f_score == pytest.approx(0.4)
        assert rep.percent()["v_measure"] == pytest.approx(34.37110184854507)
        assert set(rep.as_dict()) == {
            "homogeneity",
            "completeness",
            "v_measure",
            "paired_precision",
            "paired_recall",
            "f_score",
        }


class TestPooledTable:
    def test_single_table_pools_to_same_scores(self):
        t = table([[2, 1], [0, 1]])
        pooled = pooled_table({"bank.n": t})
        assert v_measure(pooled) == v_measure(t)
        assert paired_f_score(pooled) == paired_f_score(t)

    def test_block_diagonal_equals_label_concatenation_oracle(self):
        t1 = table([[3, 1], [0, 2]])
        t2 = table([[2, 0, 1], [1, 1, 0]])
        pooled = pooled_table({"a.n": t1, "b.v": t2})
        assert pooled.n == t1.n + t2.n
        gold1, sys1 = table_to_labels(t1.a)
        gold2, sys2 = table_to_labels(t2.a)
        gold = [f"a::{g}" for g in gold1] + [f"b::{g}" for g in gold2]
        system = [f"a::{s}" for s in sys1] + [f"b::{s}" for s in sys2]
        hom, com, v = entropy_scores(gold, system)
        assert v_measure(pooled) == pytest.approx(v, abs=1e-12)
        assert paired_f_score(pooled) == paired_scores_enumerated(gold, system)

    def test_excluded_counts_add_up(self):
        t1 = table([[2]], n_excluded=1)
        t2 = table([[3]], n_excluded=2)
        assert pooled_table({"a.n": t1, "b.n": t2}).n_excluded == 3

    def test_empty_pool_rejected(self):
        with pytest.raises(ValueError):
            pooled_table({})
