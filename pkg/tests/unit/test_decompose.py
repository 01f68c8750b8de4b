import math
import unittest

import mpmath
import numpy as np

from fq.decomp import decompose, energy, field, ratfunc, sets
from fq.decomp.decompose import ThresholdParams, effective_m, extract_subset, m_of_z, partition
from fq.decomp.exceptions import BadArgument, ExceptionalFunction, SetTooSmall
from fq.decomp.sets import FSubset


def recount_richness(ctx, S, A, U):
    """#{y in A : x + y in S} for every x in U, straight from the definition."""
    members = set(S.tolist())
    return [sum(1 for y in A.tolist() if field.add(ctx, x, y) in members) for x in U.tolist()]


def direct_branches(Z, q, log_floor=1):
    """Both branches of M(Z) at 50 digits."""
    with mpmath.workdps(50):
        Z, q = mpmath.mpf(Z), mpmath.mpf(q)
        L = max(mpmath.log(Z), mpmath.mpf(log_floor))
        first = mpmath.sqrt(q) / (mpmath.sqrt(Z) * L ** (mpmath.mpf(11) / 4))
        second = Z ** (mpmath.mpf(4) / 5) / (q ** (mpmath.mpf(2) / 5) * L ** (mpmath.mpf(31) / 10))
        return first, second


class TestThreshold(unittest.TestCase):
    def test_m_of_z_at_the_crossover(self):
        self.assertAlmostEqual(m_of_z(math.e, math.e**2), 1.0)

    def test_m_of_z_is_small_at_desk_scale(self):
        self.assertLess(m_of_z(40, 1009), 1.0)

    def test_m_of_z_first_branch_for_large_sets(self):
        Z = q = 10**6
        first, second = direct_branches(Z, q)
        self.assertLess(first, second)
        self.assertTrue(mpmath.almosteq(m_of_z(Z, q), first, rel_eps=1e-12, abs_eps=0))

    def test_m_of_z_second_branch_for_small_sets(self):
        Z, q = 10, 10**6
        first, second = direct_branches(Z, q)
        self.assertLess(second, first)
        self.assertTrue(mpmath.almosteq(m_of_z(Z, q), second, rel_eps=1e-12, abs_eps=0))

    def test_m_of_z_log_floor_below_e(self):
        self.assertAlmostEqual(m_of_z(2, 100), 2**0.8 / 100**0.4, places=12)
        first, second = direct_branches(2, 100)
        self.assertTrue(mpmath.almosteq(m_of_z(2, 100), min(first, second), rel_eps=1e-12, abs_eps=0))
        raised = m_of_z(2, 100, ThresholdParams(log_floor=2.0))
        self.assertTrue(mpmath.almosteq(raised, min(direct_branches(2, 100, 2)), rel_eps=1e-12, abs_eps=0))
        self.assertLess(raised, m_of_z(2, 100))

    def test_effective_m_prefers_the_override(self):
        self.assertEqual(effective_m(40, 1009, ThresholdParams(m_override=16.0)), 16.0)
        self.assertEqual(effective_m(40, 1009), m_of_z(40, 1009))

    def test_m_of_z_rejects_small_arguments(self):
        with self.assertRaises(BadArgument):
            m_of_z(1, 101)
        with self.assertRaises(BadArgument):
            m_of_z(10, 1)

    def test_params_are_validated(self):
        for kwargs in ({"log_floor": 0.5}, {"dyadic_base": 1}, {"m_override": 0}):
            with self.assertRaises(BadArgument):
                ThresholdParams(**kwargs)
        self.assertEqual(ThresholdParams().log(2), 1.0)


class TestDyadicClasses(unittest.TestCase):
    def test_levels_are_exact(self):
        values = np.array([1, 2, 3, 4, 7, 8, 1023, 1024])
        self.assertEqual(decompose._levels(values, 2).tolist(), [0, 1, 1, 2, 2, 3, 9, 10])
        self.assertEqual(decompose._levels(np.array([8, 9, 26, 27]), 3).tolist(), [1, 2, 2, 3])

    def test_popular_class_prefers_smaller_level_on_ties(self):
        floor, members = decompose._popular_class(np.array([1, 1, 1, 2, 3, 4]), 2, 1)
        self.assertEqual(floor, 2)
        self.assertEqual(members.tolist(), [False, False, False, True, True, False])

    def test_zeros_are_never_selected(self):
        floor, members = decompose._popular_class(np.array([0, 0, 0, 5]), 2, 2)
        self.assertEqual(floor, 4)
        self.assertEqual(members.tolist(), [False, False, False, True])


class TestExtraction(unittest.TestCase):
    def setUp(self):
        self.ctx = field.build_field(1009)
        self.f = ratfunc.inversion(self.ctx)

    def test_certificate_holds_on_an_interval(self):
        A = sets.interval(self.ctx, 0, 64)
        trace = extract_subset(self.ctx, A, self.f)
        self.assertGreater(len(trace.U_set), 0)
        self.assertEqual(trace.U_set.difference(A).tolist(), [])
        self.assertIn(trace.case, ("I", "II"))
        self.assertEqual(trace.rho & (trace.rho - 1), 0)
        richness = recount_richness(self.ctx, trace.S_set, A, trace.U_set)
        self.assertGreaterEqual(min(richness), trace.certified_u)
        self.assertEqual(trace.a_energy, energy.additive_energy(self.ctx, A).value)

    def test_certificate_holds_on_random_sets(self):
        for seed in range(3):
            A = sets.random_subset(self.ctx, 45, seed)
            trace = extract_subset(self.ctx, A, self.f)
            richness = energy.rep_diff(self.ctx, trace.S_set, A).table[trace.U_set.elems]
            self.assertGreaterEqual(int(richness.min()), trace.certified_u)

    def test_small_sets_are_rejected(self):
        with self.assertRaises(SetTooSmall):
            extract_subset(self.ctx, FSubset.of(self.ctx, [3]), self.f)

    def test_exceptional_functions_are_rejected(self):
        ctx = field.build_field(5)
        f = ratfunc.from_coeffs(ctx, [1, 2, 0, 0, 0, 1])
        with self.assertRaises(ExceptionalFunction) as cm:
            extract_subset(ctx, sets.interval(ctx, 0, 3), f)
        self.assertEqual(cm.exception.witness, 3)


class TestPartition(unittest.TestCase):
    def setUp(self):
        self.ctx = field.build_field(1009)
        self.f = ratfunc.inversion(self.ctx)

    def test_trivial_when_m_is_small(self):
        A = sets.random_subset(self.ctx, 40, 1)
        result = partition(self.ctx, A, self.f)
        self.assertTrue(result.trivial_flag)
        self.assertEqual(result.S_final, A)
        self.assertEqual(len(result.T_final), 0)
        self.assertEqual(result.iterations, [])
        self.assertTrue(result.is_valid())

    def test_singletons_are_trivial(self):
        result = partition(self.ctx, FSubset.of(self.ctx, [5]), self.f)
        self.assertTrue(result.trivial_flag)
        self.assertEqual(result.m_value, 1.0)

    def test_forced_threshold_on_an_interval(self):
        A = sets.interval(self.ctx, 0, 32)
        params = ThresholdParams(m_override=4.0)
        result = partition(self.ctx, A, self.f, params, keep_traces=True)
        self.assertFalse(result.trivial_flag)
        self.assertTrue(result.is_valid())
        self.assertEqual(result.threshold, 32**3 / 4.0)
        self.assertLessEqual(result.s_energy, result.threshold)
        self.assertEqual(result.s_energy, energy.additive_energy(self.ctx, result.S_final).value)
        self.assertGreater(len(result.iterations), 0)
        self.assertLessEqual(len(result.iterations), len(A))
        self.assertLessEqual(result.t_f_energy, result.aggregate_bound * (1 + 1e-12))
        for record in result.iterations:
            if not record.guarded:
                self.assertIsNotNone(record.trace)

    def test_whole_field(self):
        ctx = field.build_field(11)
        A = sets.whole_field(ctx)
        result = partition(ctx, A, ratfunc.inversion(ctx), ThresholdParams(m_override=2.0))
        self.assertTrue(result.is_valid())
        self.assertLessEqual(result.s_energy, 11**3 / 2.0)
        self.assertAlmostEqual(result.c1, result.s_energy * 2.0 / 11**3)

    def test_deterministic(self):
        A = sets.random_subset(self.ctx, 60, 9)
        params = ThresholdParams(m_override=8.0)
        first = partition(self.ctx, A, self.f, params)
        second = partition(self.ctx, A, self.f, params)
        self.assertEqual(first.S_final, second.S_final)
        self.assertEqual([len(Q) for Q in first.pieces], [len(Q) for Q in second.pieces])

    def test_exceptional_function(self):
        ctx = field.build_field(5)
        with self.assertRaises(ExceptionalFunction):
            partition(ctx, sets.whole_field(ctx), ratfunc.from_coeffs(ctx, [1, 2, 0, 0, 0, 1]))
