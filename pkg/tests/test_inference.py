import itertools
import math

import numpy as np
import pytest

import helpers
from slopp import (
    CircuitBuilder,
    Dataset,
    TrueUnit,
    Vtree,
    dataset_ll,
    enumerate_support,
    fully_factorized,
    log_prob,
    log_probs,
    validate,
)


class TestLogProb:
    def test_observed_record(self, reference):
        assert log_prob(reference, (0, 0, 1, 1)) == pytest.approx(math.log(1 / 10), abs=1e-12)

    def test_virtual_record(self, reference):
        assert log_prob(reference, (1, 0, 1, 1)) == pytest.approx(math.log(1 / 70), abs=1e-12)

    def test_outside_support(self, reference):
        assert log_prob(reference, (1, 1, 1, 1)) == float("-inf")

    def test_matches_hand_table(self, reference):
        for bits in itertools.product((0, 1), repeat=4):
            expected = helpers.REFERENCE_SUPPORT.get(bits)
            got = log_prob(reference, bits)
            if expected is None:
                assert got == float("-inf")
            else:
                assert got == pytest.approx(math.log(float(expected)), abs=1e-12)

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(20)
        for _ in range(20):
            _, _, _, circuit = helpers.random_learned(rng, max_vars=7, max_records=40)
            for bits in itertools.product((0, 1), repeat=circuit.num_vars):
                oracle = helpers.brute_prob(circuit, bits)
                got = log_prob(circuit, bits)
                if oracle == 0.0:
                    assert got == float("-inf")
                else:
                    assert math.exp(got) == pytest.approx(oracle, abs=1e-9)

    def test_arity_mismatch(self, reference):
        with pytest.raises(ValueError):
            log_prob(reference, (0, 0, 1))

    def test_batch_matches_single(self, reference):
        bits = np.array(list(itertools.product((0, 1), repeat=4)))
        batch = log_probs(reference, bits)
        for row, value in zip(bits, batch):
            assert value == log_prob(reference, row)


class TestDatasetLL:
    def test_training_data(self, reference, table1):
        report = dataset_ll(reference, table1)
        assert report.gamma == 0
        assert report.consistent_count == 30
        expected = sum(
            count * math.log(float(helpers.REFERENCE_SUPPORT[row]))
            for row, count in zip(helpers.TABLE1_ROWS, helpers.TABLE1_COUNTS)
        )
        assert report.ll == pytest.approx(expected, abs=1e-9)

    def test_inconsistent_record_counted(self):
        b = CircuitBuilder(Vtree.from_nested(1))
        circuit = b.build(b.literal(0, 1, True))
        report = dataset_ll(circuit, Dataset.from_records([(0,)]))
        assert report.ll == 0.0
        assert report.gamma == 1
        assert report.consistent_count == 0

    def test_empty_test_set(self, reference):
        empty = Dataset.from_records(np.zeros((0, 4)), variables=(1, 2, 3, 4))
        report = dataset_ll(reference, empty)
        assert report.ll == 0.0
        assert report.gamma == 0

    def test_counts_respected(self, reference):
        doubled = Dataset.from_records([(0, 0, 1, 1), (0, 0, 1, 1)])
        report = dataset_ll(reference, doubled)
        assert report.ll == pytest.approx(2 * math.log(1 / 10), abs=1e-12)

    def test_per_record(self, reference, table1):
        report = dataset_ll(reference, table1, per_record=True)
        assert len(report.per_record) == table1.num_distinct
        assert report.gamma + report.consistent_count == table1.num_records

    def test_variable_mismatch(self, reference):
        with pytest.raises(ValueError):
            dataset_ll(reference, Dataset.from_records([(0, 1)]))


class TestEnumerateSupport:
    def test_worked_example_support(self, reference):
        table = enumerate_support(reference)
        assert set(table) == set(helpers.REFERENCE_SUPPORT)
        observed = set(helpers.TABLE1_ROWS)
        assert set(helpers.VIRTUAL_RECORDS) == set(table) - observed
        for bits, frac in helpers.REFERENCE_SUPPORT.items():
            assert table[bits] == pytest.approx(float(frac), abs=1e-12)
        assert sum(table.values()) == pytest.approx(1.0, abs=1e-9)

    def test_single_true_unit(self):
        b = CircuitBuilder(Vtree.from_nested(1))
        circuit = b.build(b.true(0, 1, 0.25))
        assert enumerate_support(circuit) == {(1,): 0.25, (0,): 0.75}

    def test_limit_enforced(self, reference):
        with pytest.raises(ValueError, match="enumeration limit"):
            enumerate_support(reference, limit=3)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            _, _, _, circuit = helpers.random_learned(rng, max_vars=7, max_records=40)
            table = enumerate_support(circuit)
            oracle = helpers.brute_table(circuit)
            assert set(table) == set(oracle)
            for bits, p in oracle.items():
                assert table[bits] == pytest.approx(p, abs=1e-9)
            assert sum(table.values()) == pytest.approx(1.0, abs=1e-9)


class TestFullyFactorized:
    def test_smoothed_theta(self):
        data = Dataset.from_records([(1,), (0,), (1,), (0,)])
        circuit = fully_factorized(data)
        root = circuit.nodes[circuit.root]
        assert isinstance(root, TrueUnit)
        assert root.theta == pytest.approx((2 + 1) / (4 + 2))

    def test_pure_column_still_open_interval(self):
        data = Dataset.from_records([(1, 1), (1, 0)])
        circuit = fully_factorized(data)
        thetas = {n.var: n.theta for n in circuit.nodes if isinstance(n, TrueUnit)}
        assert thetas[1] == pytest.approx(3 / 4)  # (2+1)/(2+2)
        assert thetas[2] == pytest.approx(2 / 4)
        assert all(0.0 < t < 1.0 for t in thetas.values())

    def test_log_prob_is_sum_of_univariate_terms(self):
        rng = np.random.default_rng(22)
        data = Dataset.from_records(rng.integers(0, 2, size=(30, 5)))
        circuit = fully_factorized(data)
        m = data.num_records
        thetas = {n.var: n.theta for n in circuit.nodes if isinstance(n, TrueUnit)}
        for bits in itertools.product((0, 1), repeat=5):
            expected = sum(
                math.log(thetas[v] if bit else 1.0 - thetas[v])
                for v, bit in zip(circuit.variables, bits)
            )
            assert log_prob(circuit, bits) == pytest.approx(expected, abs=1e-9)

    def test_tautology_base(self):
        rng = np.random.default_rng(23)
        data = Dataset.from_records(rng.integers(0, 2, size=(40, 4)))
        circuit = fully_factorized(data)
        assert validate(circuit).ok
        # every assignment is consistent, so gamma is 0 on any test set
        assert len(enumerate_support(circuit)) == 2**4
        probe = Dataset.from_records(list(itertools.product((0, 1), repeat=4)))
        assert dataset_ll(circuit, probe).gamma == 0

    def test_empty_rejected(self):
        data = Dataset.from_records(np.zeros((0, 2)), variables=(1, 2))
        with pytest.raises(ValueError):
            fully_factorized(data)


class TestNormalization:
    def test_probability_mass_sums_to_one(self):
        rng = np.random.default_rng(24)
        for _ in range(25):
            _, _, _, circuit = helpers.random_learned(rng, max_vars=8, max_records=50)
            total = sum(
                math.exp(lp)
                for lp in log_probs(
                    circuit,
                    np.array(list(itertools.product((0, 1), repeat=circuit.num_vars))),
                )
                if np.isfinite(lp)
            )
            assert total == pytest.approx(1.0, abs=1e-9)
