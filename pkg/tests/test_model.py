"""Частотная модель, прямой проход классификатора и SGD."""

import numpy as np
import pytest

from dataset.generator import GeneratorSpec, generate_corpus
from dataset.samples import CorpusHeader, TripletSample, stack_samples
from losses.config import LossKind
from losses.evaluator import LossEvaluator
from model.classifier import (
    Classifier,
    forward_logits,
    init_classifier,
    predict_arrays,
    predict_corpus,
    predict_scores,
    softmax,
)
from model.prior import build_frequency_prior
from model.trainer import TrainConfig, train
from utils.errors import ConfigurationError, DataValidationError, DimensionMismatchError


def _zero_model(num_classes: int, feature_dim: int, prior_log=None) -> Classifier:
    return Classifier(np.zeros((num_classes, feature_dim)), np.zeros(num_classes), prior_log)


class TestFrequencyPrior:

    def test_laplace_smoothing(self):
        samples = [TripletSample(0, 0, 1, (0.0,), 0) for _ in range(9)]
        samples.append(TripletSample(0, 0, 1, (0.0,), 1))
        prior = build_frequency_prior(samples, num_classes=2, num_objects=2, smoothing=1.0)
        np.testing.assert_allclose(prior.distribution(0, 1), [10 / 12, 2 / 12])

    def test_unseen_pair_is_uniform(self):
        samples = [TripletSample(0, 0, 1, (0.0,), 2)]
        prior = build_frequency_prior(samples, num_classes=3, num_objects=2)
        np.testing.assert_allclose(prior.distribution(1, 1), [1 / 3, 1 / 3, 1 / 3])

    def test_rows_are_distributions(self, small_spec, small_corpus):
        prior = build_frequency_prior(small_corpus[0], small_spec.num_classes, small_spec.num_objects)
        np.testing.assert_allclose(prior.table.sum(axis=2), 1.0)

    @pytest.mark.parametrize("smoothing", [0.0, -1.0])
    def test_non_positive_smoothing(self, smoothing):
        samples = [TripletSample(0, 0, 0, (0.0,), 0)]
        with pytest.raises(DataValidationError):
            build_frequency_prior(samples, 2, 1, smoothing)


class TestForward:

    def test_zero_model_zero_logits(self):
        sample = TripletSample(0, 0, 0, (1.0, -2.0), 0)
        np.testing.assert_array_equal(forward_logits(_zero_model(3, 2), sample), np.zeros(3))

    def test_prior_enters_as_log_bias(self):
        prior_log = np.log(np.array([0.8, 0.2])).reshape(1, 1, 2)
        sample = TripletSample(0, 0, 0, (1.0,), 0)
        logits = forward_logits(_zero_model(2, 1, prior_log), sample)
        np.testing.assert_allclose(logits, [np.log(0.8), np.log(0.2)])

    def test_feature_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            forward_logits(_zero_model(2, 3), TripletSample(0, 0, 0, (1.0,), 0))

    def test_uniform_scores_break_ties_by_index(self):
        top1, probabilities = predict_scores(_zero_model(2, 1), TripletSample(0, 0, 0, (1.0,), 1))
        assert top1 == 0
        np.testing.assert_allclose(probabilities, [0.5, 0.5])

    def test_softmax_values(self):
        np.testing.assert_allclose(softmax(np.array([2.0, 0.0])), [0.8807970779778823, 0.11920292202211755])

    def test_softmax_shift_invariance(self):
        logits = np.random.default_rng(1).normal(size=(5, 7))
        np.testing.assert_allclose(softmax(logits + 123.0), softmax(logits), atol=1e-12)

    def test_batch_agrees_with_single(self, small_spec, small_corpus):
        model = init_classifier(small_spec.num_classes, small_spec.feature_dim, seed=5)
        records = predict_corpus(model, small_corpus[1][:20])
        for record, sample in zip(records, small_corpus[1][:20]):
            top1, probabilities = predict_scores(model, sample)
            assert record.predicted == top1
            assert record.confidence == pytest.approx(probabilities[top1], abs=1e-12)

    def test_check_compatible(self):
        model = _zero_model(3, 2)
        model.check_compatible(CorpusHeader(3, 4, 2))
        with pytest.raises(DimensionMismatchError):
            model.check_compatible(CorpusHeader(3, 4, 5))


class TestTrainer:

    def test_zero_epochs_returns_initialization(self, small_spec, small_corpus):
        config = TrainConfig(epochs=0, seed=4)
        loss = LossEvaluator(LossKind.CE, num_classes=small_spec.num_classes)
        model = train(small_corpus[0], config, loss)
        initial = init_classifier(small_spec.num_classes, small_spec.feature_dim, seed=4)
        np.testing.assert_array_equal(model.weights, initial.weights)
        np.testing.assert_array_equal(model.bias, initial.bias)

    def test_same_seed_bit_identical(self, small_spec, small_corpus):
        config = TrainConfig(epochs=2, seed=9)
        loss = LossEvaluator(LossKind.CE, num_classes=small_spec.num_classes)
        first = train(small_corpus[0], config, loss)
        second = train(small_corpus[0], config, loss)
        np.testing.assert_array_equal(first.weights, second.weights)
        np.testing.assert_array_equal(first.bias, second.bias)

    def test_separable_corpus_learned(self):
        spec = GeneratorSpec(num_classes=2, num_objects=3, feature_dim=8, num_scenes=100,
                             scene_size=8, class_separation=3.0, seed=1)
        train_samples, _ = generate_corpus(spec)
        loss = LossEvaluator(LossKind.CE, num_classes=2)
        model = train(train_samples, TrainConfig(epochs=30, seed=0), loss)
        arrays = stack_samples(train_samples)
        predicted, _ = predict_arrays(model, arrays)
        assert np.mean(predicted == arrays.labels) >= 0.99

    def test_loss_kind_must_match_config(self, small_spec, small_corpus):
        loss = LossEvaluator(LossKind.CE, num_classes=small_spec.num_classes)
        with pytest.raises(ConfigurationError):
            train(small_corpus[0], TrainConfig(loss_kind=LossKind.REWEIGHT), loss)

    def test_lattice_required_for_cdl(self):
        with pytest.raises(ConfigurationError):
            LossEvaluator(LossKind.CDL, num_classes=3)

    def test_prior_shape_checked(self, small_spec, small_corpus):
        loss = LossEvaluator(LossKind.CE, num_classes=small_spec.num_classes)
        wrong = np.zeros((small_spec.num_objects, small_spec.num_objects, 2))
        with pytest.raises(DimensionMismatchError):
            train(small_corpus[0], TrainConfig(epochs=1), loss, prior_log=wrong)
