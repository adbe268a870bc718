import numpy as np
import pytest

from openset.dataset import (
    UNLABELED,
    FeatureRecord,
    FeatureSet,
    SynthSpec,
    generate_synthetic,
)
from openset.harness import (
    PipelineConfig,
    evaluate,
    run_comparison,
    run_only_labeled,
    run_plus_one,
)
from openset.roc import ThresholdSet, calibrate
from openset.targets import build_target_matrix
from openset.trainer import ClassifierModel, TrainConfig, train_model


def identity_model(names):
    n = len(names)
    return ClassifierModel(class_names=list(names), weights=np.eye(n), dim=n, train_meta={})


class TestEvaluate:
    def test_hand_built_four_record_case(self):
        # rel1 accepted into its class, rel2 correct argmax but under the
        # cutoff, irr1 under the cutoff, irr2 over it
        model = identity_model(["A", "B"])
        thresholds = ThresholdSet(class_names=["A", "B"], values=[0.5, 0.5], strategy="normal")
        records = [
            FeatureRecord("rel1", "A", np.array([0.9, 0.0])),
            FeatureRecord("rel2", "A", np.array([0.3, 0.0])),
            FeatureRecord("irr1", UNLABELED, np.array([0.2, 0.1])),
            FeatureRecord("irr2", UNLABELED, np.array([0.0, 0.8])),
        ]
        report = evaluate(model, thresholds, FeatureSet.from_records(records))
        assert report.relevant_accuracy == 0.5
        assert report.irrelevant_accuracy == 0.5
        assert report.cumulative_accuracy == 0.5
        assert report.per_class["A"] == {"correct": 1, "total": 2}
        assert report.per_class[UNLABELED] == {"correct": 1, "total": 2}

    def test_wrong_class_above_threshold_is_an_error(self):
        model = identity_model(["A", "B"])
        thresholds = ThresholdSet.disabled(["A", "B"])
        records = [FeatureRecord("r", "A", np.array([0.1, 0.9]))]  # argmaxes B
        report = evaluate(model, thresholds, FeatureSet.from_records(records))
        assert report.relevant_accuracy == 0.0

    def test_vacuous_irrelevant_accuracy_flagged(self):
        model = identity_model(["A"])
        records = [FeatureRecord("r", "A", np.array([0.9]))]
        report = evaluate(model, ThresholdSet.disabled(["A"]), FeatureSet.from_records(records))
        assert report.relevant_accuracy == 1.0
        assert report.irrelevant_accuracy == 1.0
        assert report.irrelevant_vacuous
        assert not report.relevant_vacuous

    def test_empty_validation_set_rejected(self):
        model = identity_model(["A"])
        data = FeatureSet(records=[], dim=1, class_names=[])
        with pytest.raises(ValueError, match="empty"):
            evaluate(model, ThresholdSet.disabled(["A"]), data)

    def test_accounting_identity(self):
        spec = SynthSpec(n_rel=3, n_irr=2, dim=8, per_class_train=10,
                         per_class_val=6, spread=0.3, seed=5)
        train, val = generate_synthetic(spec)
        model = train_model(train, build_target_matrix(train, -0.2), TrainConfig(seed=5))
        report = evaluate(model, calibrate(model, train, "normal"), val)
        n_rel = sum(1 for r in val.records if r.label != UNLABELED)
        n_irr = len(val) - n_rel
        correct = sum(slot["correct"] for slot in report.per_class.values())
        total = sum(slot["total"] for slot in report.per_class.values())
        assert total == len(val)
        assert report.cumulative_accuracy == correct / total
        assert report.per_class[UNLABELED]["total"] == n_irr
        assert report.relevant_accuracy == pytest.approx(
            sum(slot["correct"] for name, slot in report.per_class.items() if name != UNLABELED) / n_rel
        )


def default_scenario(seed):
    spec = SynthSpec(n_rel=10, n_irr=10, dim=32, per_class_train=40,
                     per_class_val=10, spread=0.25, seed=seed)
    return generate_synthetic(spec)


class TestEndToEnd:
    def test_near_noiseless_corpus_classified_cleanly(self):
        spec = SynthSpec(n_rel=4, n_irr=3, dim=8, per_class_train=60,
                         per_class_val=10, spread=0.01, seed=3)
        train, val = generate_synthetic(spec)
        model = train_model(train, build_target_matrix(train, -0.2), TrainConfig(seed=3))
        report = evaluate(model, calibrate(model, train, "roc_optimal"), val)
        assert report.relevant_accuracy >= 0.95
        assert report.irrelevant_accuracy >= 0.95

    def test_normal_thresholds_pass_every_relevant_val_record_when_separable(self):
        from openset.classifier import classify_set

        spec = SynthSpec(n_rel=4, n_irr=3, dim=8, per_class_train=60,
                         per_class_val=10, spread=0.01, seed=3)
        train, val = generate_synthetic(spec)
        model = train_model(train, build_target_matrix(train, -0.2), TrainConfig(seed=3))
        thresholds = calibrate(model, train, "normal")
        decisions = classify_set(model, val, thresholds)
        for rec, dec in zip(val.records, decisions):
            if rec.label != UNLABELED:
                assert dec.relevant


class TestOnlyLabeled:
    def test_all_labeled_train_coincides_with_normal_threshold_run(self):
        spec = SynthSpec(n_rel=3, n_irr=0, dim=6, per_class_train=8,
                         per_class_val=4, spread=0.2, seed=2)
        train, val = generate_synthetic(spec)
        cfg = PipelineConfig(train=TrainConfig(seed=2))
        baseline = run_only_labeled(train, val, cfg)
        model = train_model(train, build_target_matrix(train, cfg.negative_value), cfg.train)
        direct = evaluate(model, calibrate(model, train, "normal"), val)
        assert baseline.relevant_accuracy == direct.relevant_accuracy
        assert baseline.cumulative_accuracy == direct.cumulative_accuracy
        assert baseline.per_class == direct.per_class

    def test_unlabeled_only_train_rejected(self):
        records = [FeatureRecord("u", UNLABELED, np.array([0.5, 0.5]))]
        data = FeatureSet.from_records(records)
        with pytest.raises(ValueError, match="labeled"):
            run_only_labeled(data, data, PipelineConfig())

    def test_deterministic(self):
        train, val = default_scenario(0)
        cfg = PipelineConfig(train=TrainConfig(seed=0))
        r1 = run_only_labeled(train, val, cfg)
        r2 = run_only_labeled(train, val, cfg)
        assert r1 == r2


class TestPlusOne:
    def test_imbalanced_train_suppresses_relevant_side(self):
        # unlabeled pool as large as all labeled classes together
        train, val = default_scenario(6)
        cfg = PipelineConfig(train=TrainConfig(seed=6))
        plus = run_plus_one(train, val, cfg)
        only = run_only_labeled(train, val, cfg)
        assert plus.irrelevant_accuracy > plus.relevant_accuracy
        assert plus.relevant_accuracy < only.relevant_accuracy
        assert plus.irrelevant_accuracy > only.irrelevant_accuracy
        assert plus.config["strategy"] == "argmax_plus_one"

    def test_deterministic(self):
        spec = SynthSpec(n_rel=3, n_irr=3, dim=8, per_class_train=10,
                         per_class_val=5, spread=0.3, seed=4)
        train, val = generate_synthetic(spec)
        cfg = PipelineConfig(train=TrainConfig(seed=4))
        assert run_plus_one(train, val, cfg) == run_plus_one(train, val, cfg)


class TestRunComparison:
    def test_four_rows_on_shared_data(self):
        spec = SynthSpec(n_rel=3, n_irr=3, dim=8, per_class_train=12,
                         per_class_val=6, spread=0.25, seed=8)
        train, val = generate_synthetic(spec)
        table = run_comparison(train, val, PipelineConfig(train=TrainConfig(seed=8)))
        assert [r.method for r in table.rows] == [
            "our_method",
            "our_method_roc",
            "plus_one",
            "only_labeled",
        ]
        assert table.failures == {}
        assert table.dataset["train_records"] == len(train)
        assert table.dataset["val_records"] == len(val)
        for row in table.rows:
            total = sum(slot["total"] for slot in row.per_class.values())
            assert total == len(val)

    def test_roc_row_beats_only_labeled_cumulatively(self):
        train, val = default_scenario(5)
        table = run_comparison(train, val, PipelineConfig(train=TrainConfig(seed=5)))
        assert (
            table.row("our_method_roc").cumulative_accuracy
            >= table.row("only_labeled").cumulative_accuracy
        )

    def test_constraint_sweep_direction(self):
        train, val = default_scenario(5)
        cfg = PipelineConfig(train=TrainConfig(seed=5))
        reports = [
            run_comparison(train, val, cfg, q=q).row("our_method_roc")
            for q in (0.8, 0.9, 0.925)
        ]
        rel = [r.relevant_accuracy for r in reports]
        irr = [r.irrelevant_accuracy for r in reports]
        assert rel == sorted(rel)
        assert irr == sorted(irr, reverse=True)

    def test_identical_seeds_identical_tables(self):
        spec = SynthSpec(n_rel=3, n_irr=2, dim=8, per_class_train=10,
                         per_class_val=5, spread=0.3, seed=1)
        train, val = generate_synthetic(spec)
        cfg = PipelineConfig(train=TrainConfig(seed=1))
        t1 = run_comparison(train, val, cfg)
        t2 = run_comparison(train, val, cfg)
        assert t1.to_dict() == t2.to_dict()

    def test_failed_row_is_flagged_others_survive(self, monkeypatch):
        spec = SynthSpec(n_rel=2, n_irr=2, dim=6, per_class_train=6,
                         per_class_val=3, spread=0.3, seed=2)
        train, val = generate_synthetic(spec)

        def boom(*args, **kwargs):
            raise RuntimeError("plus_one exploded")

        monkeypatch.setattr("openset.harness.run_plus_one", boom)
        table = run_comparison(train, val, PipelineConfig(train=TrainConfig(seed=2, epochs=30)))
        assert list(table.failures) == ["plus_one"]
        assert "exploded" in table.failures["plus_one"]
        assert [r.method for r in table.rows] == ["our_method", "our_method_roc", "only_labeled"]

    def test_untrainable_set_fails_every_row_without_crashing(self):
        records = [FeatureRecord("u1", UNLABELED, np.array([0.2, 0.8])),
                   FeatureRecord("u2", UNLABELED, np.array([0.7, 0.1]))]
        train = FeatureSet.from_records(records)
        val = FeatureSet.from_records([FeatureRecord("v", UNLABELED, np.array([0.5, 0.1]))])
        table = run_comparison(train, val, PipelineConfig(train=TrainConfig(epochs=5)))
        assert set(table.failures) == {
            "our_method",
            "our_method_roc",
            "plus_one",
            "only_labeled",
        }
        assert table.rows == []
