import math

import pytest

from axiomdiag import axioms
from axiomdiag.axioms import (
    AxiomParams,
    DiagnosticInstance,
    check_fulfilment,
    lnc1_eligible,
    lnc2_generate,
    mtdc_eligible,
    stmc1_eligible,
    stmc2_eligible,
    stmc3_eligible,
    tfc1_eligible,
    tfc2_eligible,
    tp_eligible,
)
from axiomdiag.embeddings import EmbeddingTable
from axiomdiag.errors import DataError

PARAMS = AxiomParams()


def table_of(**vectors):
    dim = len(next(iter(vectors.values())))
    table = EmbeddingTable(dim=dim)
    for term, vec in vectors.items():
        table.add(term, vec)
    return table


class TestTfc1:
    Q = ("a", "b")

    def test_strict_surplus_eligible(self):
        assert tfc1_eligible(self.Q, ("a", "a", "b", "x"), ("a", "b", "x", "y"), PARAMS)

    def test_equal_sums_ineligible(self):
        assert not tfc1_eligible(self.Q, ("a", "b"), ("a", "b"), PARAMS)

    def test_per_term_dominance_required(self):
        assert not tfc1_eligible(self.Q, ("a", "a", "b"), ("a", "b", "b"), PARAMS)

    def test_length_gap_guard(self):
        d1 = ("a",) * 2 + ("x",) * 20
        d2 = ("a",)
        assert not tfc1_eligible(self.Q, d1, d2, PARAMS)
        assert tfc1_eligible(self.Q, d1, d2, AxiomParams(delta_len=25))

    def test_antisymmetric(self):
        d1, d2 = ("a", "a", "b", "x"), ("a", "b", "x", "y")
        assert not (tfc1_eligible(self.Q, d1, d2, PARAMS) and tfc1_eligible(self.Q, d2, d1, PARAMS))


class TestTfc2:
    def test_equal_steps_eligible(self):
        assert tfc2_eligible(("a",), ("a", "x", "x"), ("a", "a", "x"), ("a", "a", "a"), PARAMS)

    def test_zero_query_terms_ineligible(self):
        assert not tfc2_eligible(("a",), ("x", "x", "x"), ("a", "x", "x"), ("a", "a", "x"), PARAMS)

    def test_unequal_steps_ineligible(self):
        assert not tfc2_eligible(
            ("a",), ("a", "x", "x", "x"), ("a", "a", "x", "x"), ("a", "a", "a", "a"), PARAMS
        )


class TestMtdc:
    Q = ("a", "b")

    @staticmethod
    def idf(term):
        return {"a": 0.9, "b": 0.3}[term]

    def test_swap_toward_high_idf_eligible(self):
        assert mtdc_eligible(self.Q, ("a", "a", "b", "x"), ("a", "b", "b", "x"), self.idf, PARAMS)

    def test_identical_docs_ineligible(self):
        assert not mtdc_eligible(self.Q, ("a", "b"), ("a", "b"), self.idf, PARAMS)

    def test_mirror_direction(self):
        d1, d2 = ("a", "a", "b", "x"), ("a", "b", "b", "x")

        def low_a(term):
            return {"a": 0.3, "b": 0.9}[term]

        assert not mtdc_eligible(self.Q, d1, d2, low_a, PARAMS)
        assert mtdc_eligible(self.Q, d2, d1, low_a, PARAMS)

    def test_unpaired_difference_ineligible(self):
        # a gains but b does not lose the matching amount
        assert not mtdc_eligible(self.Q, ("a", "a", "b"), ("a", "b", "x"), self.idf, PARAMS)


class TestLnc1:
    Q = ("a",)

    def test_one_extra_non_query_token(self):
        assert lnc1_eligible(self.Q, ("a", "x"), ("a", "x", "y"))

    def test_query_counts_must_match(self):
        assert not lnc1_eligible(self.Q, ("a", "x"), ("a", "a", "x", "y"))

    def test_plus_two_is_ineligible(self):
        assert not lnc1_eligible(self.Q, ("a", "x"), ("a", "x", "y", "y"))


class TestLnc2Generate:
    def test_double_at_200(self):
        tokens = ("w",) * 200
        generated, k = lnc2_generate(tokens, PARAMS)
        assert k == 2 and len(generated) == 400

    def test_too_long_to_duplicate(self):
        assert lnc2_generate(("w",) * 300, PARAMS) is None

    def test_triple_at_170(self):
        generated, k = lnc2_generate(("w",) * 170, PARAMS)
        assert k == 3 and len(generated) == 510

    def test_empty_document(self):
        assert lnc2_generate((), PARAMS) is None

    def test_counts_scale_by_k(self):
        tokens = ("a", "b", "a")
        generated, k = lnc2_generate(tokens, AxiomParams(max_tokens=10))
        assert k == 3
        assert generated.count("a") == 3 * tokens.count("a")


class TestTp:
    Q = ("a", "b")

    def test_closer_pair_wins(self):
        assert tp_eligible(self.Q, ("a", "b", "x"), ("a", "x", "x", "b"))

    def test_undefined_gamma_guard(self):
        assert not tp_eligible(self.Q, ("a", "b", "x"), ("a", "a", "x"))

    def test_tie_ineligible(self):
        assert not tp_eligible(self.Q, ("a", "b"), ("b", "a"))

    def test_antisymmetric(self):
        d1, d2 = ("a", "b", "x"), ("a", "x", "x", "b")
        assert not (tp_eligible(self.Q, d1, d2) and tp_eligible(self.Q, d2, d1))


class TestStmc1:
    def test_semantically_closer_remainder(self):
        table = table_of(dog=(1.0, 0.0), puppy=(0.9, 0.1), car=(0.0, 1.0))
        assert stmc1_eligible(("dog",), ("dog", "puppy"), ("dog", "car"), table, PARAMS)

    def test_coverage_mismatch(self):
        table = table_of(dog=(1.0, 0.0), puppy=(0.9, 0.1), car=(0.0, 1.0))
        assert not stmc1_eligible(("dog",), ("dog", "puppy"), ("car", "car"), table, PARAMS)

    def test_empty_remainder_is_ineligible(self):
        table = table_of(dog=(1.0, 0.0), car=(0.0, 1.0))
        assert not stmc1_eligible(("dog",), ("dog",), ("dog", "car"), table, PARAMS)


class TestStmc2:
    def test_hand_example(self):
        table = table_of(car=(0.0, 1.0), wolf=(0.8, 0.2))
        # sigma'([car],[wolf]) = 0.2/sqrt(0.68) ~ 0.2425 > 0.2
        assert stmc2_eligible(("dog",), ("dog", "car"), ("wolf", "wolf"), table, PARAMS)

    def test_mass_guard(self):
        table = table_of(car=(0.0, 1.0), wolf=(0.8, 0.2))
        assert not stmc2_eligible(("dog",), ("dog", "dog", "car"), ("wolf", "wolf"), table, PARAMS)

    def test_empty_remainder_is_skipped(self):
        table = table_of(car=(0.0, 1.0), wolf=(0.8, 0.2))
        assert not stmc2_eligible(("dog",), ("dog",), ("wolf", "wolf"), table, PARAMS)

    def test_similarity_threshold(self):
        table = table_of(car=(0.0, 1.0), wolf=(0.8, 0.2))
        high = AxiomParams(delta_sim=0.5)
        assert not stmc2_eligible(("dog",), ("dog", "car"), ("wolf", "wolf"), table, high)


class TestStmc3:
    TABLE = table_of(a=(1.0, 0.0), b=(0.0, 1.0), s=(0.6, 0.6), x=(0.0, -1.0))
    Q = ("a", "b")

    def test_hand_example(self):
        assert stmc3_eligible(self.Q, ("a", "a", "b", "x"), ("a", "b", "s", "x"), self.TABLE, PARAMS)

    def test_equal_query_mass_ineligible(self):
        assert not stmc3_eligible(self.Q, ("a", "b", "x", "x"), ("a", "b", "s", "x"), self.TABLE, PARAMS)

    def test_coverage_mismatch_ineligible(self):
        assert not stmc3_eligible(self.Q, ("a", "a", "a", "x"), ("a", "b", "s", "x"), self.TABLE, PARAMS)


class TestCheckFulfilment:
    def _scores(self, mapping):
        return {("q1", d): s for d, s in mapping.items()}

    def test_strict_pair(self):
        inst = DiagnosticInstance(axioms.TFC1, "q1", ("d1", "d2"))
        assert check_fulfilment(inst, self._scores({"d1": 2.0, "d2": 1.0}), PARAMS)
        assert not check_fulfilment(inst, self._scores({"d1": 1.0, "d2": 1.0}), PARAMS)

    def test_non_strict_tie(self):
        inst = DiagnosticInstance(axioms.MTDC, "q1", ("d1", "d2"))
        assert check_fulfilment(inst, self._scores({"d1": 1.0, "d2": 1.0}), PARAMS)

    def test_tfc2_diminishing_gap(self):
        inst = DiagnosticInstance(axioms.TFC2, "q1", ("d1", "d2", "d3"))
        scores = self._scores({"d1": 1.0, "d2": 2.0, "d3": 2.5})
        assert check_fulfilment(inst, scores, PARAMS)
        widening = self._scores({"d1": 1.0, "d2": 1.5, "d3": 2.5})
        assert not check_fulfilment(inst, widening, PARAMS)

    def test_missing_score_names_key(self):
        inst = DiagnosticInstance(axioms.TFC1, "q1", ("d1", "d2"))
        with pytest.raises(DataError, match=r"q1.*d2"):
            check_fulfilment(inst, self._scores({"d1": 1.0}), PARAMS)

    def test_constant_shift_invariance(self):
        for axiom in axioms.ALL_AXIOMS:
            arity = 3 if axiom == axioms.TFC2 else 2
            inst = DiagnosticInstance(axiom, "q1", tuple(f"d{i}" for i in range(arity)))
            base = {("q1", f"d{i}"): float(i * i) for i in range(arity)}
            shifted = {k: v + 123.456 for k, v in base.items()}
            assert check_fulfilment(inst, base, PARAMS) == check_fulfilment(inst, shifted, PARAMS)


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            AxiomParams(delta_len=-1)
        with pytest.raises(ValueError):
            AxiomParams(delta_sim=1.5)
        with pytest.raises(ValueError):
            AxiomParams(max_tokens=1)
        with pytest.raises(ValueError):
            AxiomParams(epsilon=-1e-9)
