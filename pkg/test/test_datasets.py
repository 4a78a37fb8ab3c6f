import tempfile
import unittest
from os import path

import numpy as np

from qfibound.experiments.datasets import (
    Dataset, DatasetCache, FeatureScaler, export_bundled_datasets, load_digits, load_iris, pca_project,
    pca_reduce, prepare_split, scale_features,
)
from qfibound.util.errors import DataError

IRIS_HEADER = "sepal_length,sepal_width,petal_length,petal_width,class\n"


def write(directory, name, text):
    file_path = path.join(directory, name)
    with open(file_path, "w", encoding="utf-8") as file:
        file.write(text)
    return file_path


def synthetic(n_per_class=20, m=4, seed=60):
    rng = np.random.default_rng(seed)
    features = np.vstack([rng.normal(0.0, 1.0, (n_per_class, m)), rng.normal(3.0, 1.0, (n_per_class, m))])
    labels = np.array([-1.0] * n_per_class + [1.0] * n_per_class)
    return Dataset("synthetic", features, labels)


class TestBundledDatasets(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.directory = tempfile.TemporaryDirectory()
        cls.written = export_bundled_datasets(cls.directory.name)

    @classmethod
    def tearDownClass(cls):
        cls.directory.cleanup()

    def test_iris(self):
        iris = load_iris(self.written["iris"])
        self.assertEqual(len(iris), 100)
        self.assertEqual(iris.features.shape, (100, 4))
        self.assertEqual(int(np.sum(iris.labels == 1.0)), 50)

    def test_digits(self):
        digits = load_digits(self.written["digits"])
        self.assertEqual(digits.features.shape[1], 64)
        self.assertEqual(int(np.sum(digits.labels == -1.0)), 178)
        self.assertEqual(int(np.sum(digits.labels == 1.0)), 182)
        self.assertTrue(np.all((digits.features >= 0) & (digits.features <= 16)))

    def test_cache(self):
        cache = DatasetCache()
        self.assertIs(cache, DatasetCache())
        first = cache.get("iris", self.directory.name)
        self.assertIs(cache.get("iris", self.directory.name), first)
        cache.clear()
        self.assertIsNot(cache.get("iris", self.directory.name), first)
        with self.assertRaises(DataError):
            cache.get("mnist", self.directory.name)


class TestMalformedFiles(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.directory.cleanup()

    def test_missing_file(self):
        with self.assertRaises(DataError):
            load_iris(path.join(self.directory.name, "absent.csv"))

    def test_non_numeric_value(self):
        file_path = write(self.directory.name, "iris.csv",
                          IRIS_HEADER + "5.1,3.5,1.4,0.2,0\n4.9,3.0,1.4,0.2,1\n4.7,abc,1.3,0.2,0\n")
        with self.assertRaises(DataError) as context:
            load_iris(file_path)
        self.assertEqual(context.exception.line, 4)

    def test_extra_field(self):
        file_path = write(self.directory.name, "iris.csv",
                          IRIS_HEADER + "5.1,3.5,1.4,0.2,0\n4.9,3.0,1.4,0.2,1\n4.7,3.2,1.3,0.2,0,7\n")
        with self.assertRaises(DataError) as context:
            load_iris(file_path)
        self.assertEqual(context.exception.line, 4)

    def test_invalid_class(self):
        file_path = write(self.directory.name, "iris.csv", IRIS_HEADER + "5.1,3.5,1.4,0.2,0\n4.9,3.0,1.4,0.2,4\n")
        with self.assertRaises(DataError) as context:
            load_iris(file_path)
        self.assertEqual(context.exception.line, 3)

    def test_wrong_header(self):
        file_path = write(self.directory.name, "iris.csv", "a,b,c,d,e\n1,2,3,4,0\n")
        with self.assertRaises(DataError) as context:
            load_iris(file_path)
        self.assertEqual(context.exception.line, 1)

    def test_empty(self):
        with self.assertRaisesRegex(DataError, "empty dataset"):
            load_iris(write(self.directory.name, "header.csv", IRIS_HEADER))
        with self.assertRaisesRegex(DataError, "empty dataset"):
            load_iris(write(self.directory.name, "blank.csv", ""))

    def test_single_class(self):
        file_path = write(self.directory.name, "iris.csv",
                          IRIS_HEADER + "5.1,3.5,1.4,0.2,0\n4.9,3.0,1.4,0.2,0\n6.3,3.3,6.0,2.5,2\n")
        with self.assertRaisesRegex(DataError, "fewer than 2 classes"):
            load_iris(file_path)


class TestFeatures(unittest.TestCase):

    def test_pca_rank_one(self):
        rng = np.random.default_rng(61)
        direction = np.array([0.6, -0.8, 0.0])
        features = rng.normal(size=(30, 1)) * direction + np.array([1.0, 2.0, 3.0])
        projected, projection, mean = pca_reduce(features, 1)
        np.testing.assert_allclose(projection[:, 0], [-0.6, 0.8, 0.0], atol=1e-10)
        np.testing.assert_allclose(projected @ projection.T + mean, features, atol=1e-10)

    def test_pca_full_rank(self):
        rng = np.random.default_rng(62)
        features = rng.normal(size=(20, 5))
        projected, projection, mean = pca_reduce(features, 5)
        np.testing.assert_allclose(projection.T @ projection, np.eye(5), atol=1e-10)
        np.testing.assert_allclose(projected @ projection.T + mean, features, atol=1e-10)
        np.testing.assert_allclose(pca_project(features, projection, mean), projected, atol=1e-12)
        for column in projection.T:
            self.assertGreater(column[np.argmax(np.abs(column))], 0.0)
        with self.assertRaises(ValueError):
            pca_reduce(features, 0)
        with self.assertRaises(ValueError):
            pca_reduce(features, 6)

    def test_scaler(self):
        train = np.array([[0.0, 5.0, 1.0], [2.0, 5.0, 3.0]])
        scaler = FeatureScaler().fit(train)
        np.testing.assert_allclose(scaler.transform(train), [[0.0, 0.0, 0.0], [np.pi, 0.0, np.pi]])
        np.testing.assert_allclose(scaler.transform([[-1.0, 7.0, 2.0], [4.0, 5.0, 0.0]]),
                                   [[0.0, 0.0, np.pi / 2], [np.pi, 0.0, 0.0]])
        scaled = scale_features(train)
        np.testing.assert_allclose(scale_features(scaled), scaled)
        with self.assertRaises(ValueError):
            FeatureScaler().transform(train)


class TestSplit(unittest.TestCase):

    def test_stratified_and_disjoint(self):
        dataset = synthetic()
        split = prepare_split(dataset, n_train=10, seed=3)
        self.assertEqual(len(split.train), 10)
        self.assertEqual(len(split.test), 30)
        self.assertFalse(set(split.train_indices) & set(split.test_indices))
        self.assertEqual(sorted(split.train_indices + split.test_indices), list(range(40)))
        self.assertEqual(int(np.sum(split.train.labels == 1.0)), 5)
        self.assertTrue(np.all((split.train.features >= 0) & (split.train.features <= np.pi)))
        self.assertTrue(np.all((split.test.features >= 0) & (split.test.features <= np.pi)))

    def test_seeded(self):
        dataset = synthetic()
        self.assertEqual(prepare_split(dataset, 12, seed=4).train_indices,
                         prepare_split(dataset, 12, seed=4).train_indices)
        self.assertEqual(len(prepare_split(dataset).train), 20)

    def test_pca(self):
        split = prepare_split(synthetic(m=6), n_train=16, pca_components=2)
        self.assertEqual(split.train.features.shape, (16, 2))
        self.assertEqual(split.test.features.shape, (24, 2))
        unreduced = prepare_split(synthetic(m=6), n_train=16, pca_components=8)
        self.assertEqual(unreduced.train.features.shape, (16, 6))

    def test_held_out_set_is_shared(self):
        dataset = synthetic(n_per_class=50)
        splits = [prepare_split(dataset, n_train, seed=2, test_size=20) for n_train in (20, 40, 60, 80)]
        for split, n_train in zip(splits, (20, 40, 60, 80)):
            self.assertEqual(len(split.train), n_train)
            self.assertEqual(split.test_indices, splits[0].test_indices)
            self.assertFalse(set(split.train_indices) & set(split.test_indices))
            self.assertEqual(int(np.sum(split.test.labels == 1.0)), 10)
        self.assertEqual(sorted(splits[-1].train_indices + splits[-1].test_indices), list(range(100)))
        self.assertNotEqual(prepare_split(dataset, 20, seed=3, test_size=20).test_indices, splits[0].test_indices)
        self.assertEqual(len(prepare_split(dataset, seed=2, test_size=20).train), 80)

    def test_rejects(self):
        with self.assertRaises(ValueError):
            prepare_split(synthetic(), n_train=40)
        with self.assertRaises(ValueError):
            prepare_split(synthetic(), n_train=0)
        with self.assertRaises(ValueError):
            prepare_split(synthetic(), n_train=31, test_size=10)
        with self.assertRaises(ValueError):
            prepare_split(synthetic(), n_train=10, test_size=1)


if __name__ == '__main__':
    unittest.main()
