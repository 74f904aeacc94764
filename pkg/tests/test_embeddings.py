import math
import random

import pytest

from axiomdiag.embeddings import EmbeddingTable, load_vectors, sigma, sigma_prime
from axiomdiag.errors import DataError

from conftest import random_embedding_table


@pytest.fixture
def small_table():
    table = EmbeddingTable(dim=2)
    table.add("dog", (1.0, 0.0))
    table.add("car", (0.0, 1.0))
    table.add("puppy", (0.9, 0.1))
    return table


class TestSigma:
    def test_orthogonal(self, small_table):
        assert sigma("dog", "car", small_table) == 0.0

    def test_self_similarity(self, small_table):
        assert sigma("dog", "dog", small_table) == pytest.approx(1.0, abs=1e-12)

    def test_oov_is_undefined(self, small_table):
        assert sigma("dog", "unknown", small_table) is None

    def test_zero_norm_is_undefined(self, small_table):
        small_table.add("null", (0.0, 0.0))
        assert sigma("dog", "null", small_table) is None


class TestSigmaPrime:
    def test_identical_singletons(self, small_table):
        assert sigma_prime(["dog"], ["dog"], small_table) == pytest.approx(1.0, abs=1e-12)

    def test_hand_cosine(self, small_table):
        table = EmbeddingTable(dim=2)
        table.add("a", (1.0, 0.0))
        table.add("b", (0.0, 1.0))
        # cos((0.5, 0.5), (1, 0)) = 1/sqrt(2)
        assert sigma_prime(["a", "b"], ["a"], table) == pytest.approx(1 / math.sqrt(2), abs=1e-12)

    def test_fully_oov_side(self, small_table):
        assert sigma_prime(["unknown"], ["dog"], small_table) is None

    def test_oov_tokens_skipped_from_mean(self, small_table):
        with_oov = sigma_prime(["dog", "unknown"], ["car"], small_table)
        without = sigma_prime(["dog"], ["car"], small_table)
        assert with_oov == without


class TestProperties:
    def test_symmetry_range_self_similarity_duplication(self):
        rng = random.Random(17)
        vocabulary = [f"w{i}" for i in range(10)]
        table = random_embedding_table(rng, vocabulary, dim=5, oov_rate=0.0)
        for t1 in vocabulary:
            assert sigma(t1, t1, table) == pytest.approx(1.0, abs=1e-12)
            for t2 in vocabulary:
                value = sigma(t1, t2, table)
                assert value == sigma(t2, t1, table)
                assert -1.0 <= value <= 1.0
        for _ in range(200):
            side1 = [rng.choice(vocabulary) for _ in range(rng.randint(1, 6))]
            side2 = [rng.choice(vocabulary) for _ in range(rng.randint(1, 6))]
            value = sigma_prime(side1, side2, table)
            assert value == sigma_prime(side2, side1, table)
            assert -1.0 <= value <= 1.0
            # order invariance and uniform duplication invariance
            assert sigma_prime(sorted(side1), side2, table) == pytest.approx(value, abs=1e-12)
            assert sigma_prime(side1 * 2, side2, table) == pytest.approx(value, abs=1e-12)


class TestLoadVectors:
    def test_plain_file(self, tmp_path):
        path = tmp_path / "vecs.txt"
        path.write_text("dog 1.0 0.0\ncar 0.0 1.0\n", encoding="utf-8")
        table = load_vectors(path)
        assert table.dim == 2
        assert sigma("dog", "car", table) == 0.0

    def test_header_autodetected(self, tmp_path):
        path = tmp_path / "vecs.txt"
        path.write_text("2 3\ndog 1 0 0\ncar 0 1 0\n", encoding="utf-8")
        table = load_vectors(path)
        assert table.dim == 3

    def test_bad_component(self, tmp_path):
        path = tmp_path / "vecs.txt"
        path.write_text("dog 1.0 oops\n", encoding="utf-8")
        with pytest.raises(DataError):
            load_vectors(path)

    def test_dimension_mismatch(self, tmp_path):
        path = tmp_path / "vecs.txt"
        path.write_text("dog 1.0 0.0\ncar 0.0\n", encoding="utf-8")
        with pytest.raises(DataError):
            load_vectors(path)
