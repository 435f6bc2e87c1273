import numpy as np
import pytest

from fedsplit.datasets import synthetic_dataset
from fedsplit.errors import DivergenceError
from fedsplit.models import (ModelSpec, evaluate_accuracy, init_params,
                             local_train, loss_and_grad, param_count)


class TestSpecAndPacking:
    def test_param_counts(self):
        assert param_count(ModelSpec("linear", 3, 2)) == 6
        assert param_count(ModelSpec("logistic", 3, 2)) == 8
        assert param_count(ModelSpec("mlp", 4, 3, hidden_dims=(8,))) == 4*8 + 8 + 8*3 + 3

    def test_validation(self):
        with pytest.raises(ValueError):
            ModelSpec("cnn", 3, 2)
        with pytest.raises(ValueError):
            ModelSpec("mlp", 3, 2)  # no hidden dims
        with pytest.raises(ValueError):
            ModelSpec("linear", 3, 2, hidden_dims=(4,))

    def test_init_deterministic(self):
        spec = ModelSpec("mlp", 4, 3, hidden_dims=(8,))
        assert np.array_equal(init_params(spec, 5), init_params(spec, 5))


class TestGradients:
    @pytest.mark.parametrize("spec", [
        ModelSpec("linear", 4, 3),
        ModelSpec("logistic", 4, 3),
        ModelSpec("mlp", 4, 3, hidden_dims=(6,)),
        ModelSpec("mlp", 4, 3, hidden_dims=(6, 5)),
    ])
    def test_against_finite_differences(self, spec):
        rng = np.random.default_rng(0)
        w = init_params(spec, 1) + rng.normal(0, 0.1, param_count(spec))
        X = rng.normal(0, 1, (12, 4))
        y = rng.integers(0, 3, 12)
        loss, grad = loss_and_grad(spec, w, X, y)
        eps = 1e-6
        idx = rng.choice(w.size, size=min(25, w.size), replace=False)
        for j in idx:
            wp, wm = w.copy(), w.copy()
            wp[j] += eps
            wm[j] -= eps
            num = (loss_and_grad(spec, wp, X, y)[0]
                   - loss_and_grad(spec, wm, X, y)[0]) / (2 * eps)
            assert grad[j] == pytest.approx(num, rel=1e-4, abs=1e-7)


class TestLocalTrain:
    def test_zero_learning_rate_requires_positive(self):
        # the runtime enforces eta > 0; at the model level an eta of 0 is the
        # no-learning identity
        spec = ModelSpec("linear", 1, 1)
        w = np.zeros(1)
        u = local_train(spec, w, np.array([[1.0]]), np.array([0]),
                        epochs=3, learning_rate=0.0, batch_size=1, seed=0)
        assert np.array_equal(u, np.zeros(1))

    def test_hand_computed_linear_step(self):
        # one sample (x=1, y=one-hot class 0 = [1]), w0=0, squared loss
        # 0.5*(w*x - 1)^2: gradient -1, one step with eta=0.1 gives u = +0.1
        spec = ModelSpec("linear", 1, 1)
        u = local_train(spec, np.zeros(1), np.array([[1.0]]), np.array([0]),
                        epochs=1, learning_rate=0.1, batch_size=1, seed=0)
        assert u.tolist() == [pytest.approx(0.1, abs=1e-15)]

    def test_input_params_not_mutated(self):
        spec = ModelSpec("logistic", 3, 2)
        w = init_params(spec, 0)
        w_copy = w.copy()
        local_train(spec, w, np.ones((4, 3)), np.array([0, 1, 0, 1]),
                    epochs=1, learning_rate=0.1, batch_size=2, seed=0)
        assert np.array_equal(w, w_copy)

    def test_loss_decreases_on_separable_data(self):
        ds = synthetic_dataset(300, 6, 3, 3.0, seed=2)
        spec = ModelSpec("logistic", 6, 3)
        w = init_params(spec, 0)
        losses = []
        for epoch in range(3):
            u = local_train(spec, w, ds.features, ds.labels, epochs=1,
                            learning_rate=0.1, batch_size=32, seed=epoch)
            w = w + u
            losses.append(loss_and_grad(spec, w, ds.features, ds.labels)[0])
        assert losses[0] > losses[1] > losses[2]

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_divergence_guard(self):
        # overflow to inf is the expected path into the guard
        spec = ModelSpec("linear", 1, 1)
        with pytest.raises(DivergenceError):
            local_train(spec, np.array([1.0]), np.array([[1e200]]),
                        np.array([0]), epochs=5, learning_rate=1e300,
                        batch_size=1, seed=0)

    def test_determinism(self):
        ds = synthetic_dataset(128, 5, 2, 2.0, seed=3)
        spec = ModelSpec("mlp", 5, 2, hidden_dims=(8,))
        w = init_params(spec, 0)
        u1 = local_train(spec, w, ds.features, ds.labels, 2, 0.05, 16, seed=9)
        u2 = local_train(spec, w, ds.features, ds.labels, 2, 0.05, 16, seed=9)
        assert np.array_equal(u1, u2)


class TestEvaluate:
    def test_perfect_predictor(self):
        ds = synthetic_dataset(200, 4, 2, 12.0, seed=4)
        spec = ModelSpec("logistic", 4, 2)
        w = init_params(spec, 0)
        for _ in range(30):
            w += local_train(spec, w, ds.features, ds.labels, 1, 0.5, 32, seed=1)
        assert evaluate_accuracy(spec, w, ds.features, ds.labels) == 1.0

    def test_constant_predictor_on_balanced_classes(self):
        ds = synthetic_dataset(400, 4, 4, 2.0, seed=5)
        spec = ModelSpec("logistic", 4, 4)
        acc = evaluate_accuracy(spec, np.zeros(param_count(spec)),
                                ds.features, ds.labels)
        # zero weights predict class 0 everywhere; labels are balanced
        assert acc == pytest.approx(0.25, abs=0.01)

    def test_empty_set_rejected(self):
        spec = ModelSpec("logistic", 4, 2)
        with pytest.raises(ValueError):
            evaluate_accuracy(spec, np.zeros(param_count(spec)),
                              np.empty((0, 4)), np.empty(0, dtype=np.int64))
