import unittest

import numpy as np

from fq.decomp import field
from fq.decomp.exceptions import BadArgument, ConfigError, DivisionByZero, FieldTooLarge, NonPrime


class TestBuildField(unittest.TestCase):
    def test_prime_field_generator(self):
        ctx = field.build_field(5)
        self.assertEqual(ctx.generator, 2)
        self.assertEqual(ctx.q, 5)
        self.assertIsNone(ctx.params.modulus)
        self.assertEqual(sorted(ctx.exp_table.tolist()), [1, 2, 3, 4])

    def test_gf4_tables(self):
        ctx = field.build_field(2, 2)
        self.assertEqual(ctx.params.modulus, (1, 1, 1))
        self.assertEqual(ctx.generator, 2)
        self.assertEqual(field.mul(ctx, 2, 2), 3)
        self.assertEqual(field.inv(ctx, 2), 3)
        self.assertEqual(field.trace(ctx, 2), 1)
        self.assertEqual(field.add(ctx, 2, 3), 1)
        self.assertEqual(field.format_element(ctx, 3), "a + 1")

    def test_dlog_table_marks_zero(self):
        ctx = field.build_field(3, 2)
        self.assertEqual(ctx.dlog_table[0], -1)
        np.testing.assert_array_equal(ctx.exp_table[ctx.dlog_table[1:]], np.arange(1, 9))

    def test_tables_are_read_only(self):
        ctx = field.build_field(7)
        with self.assertRaises(ValueError):
            ctx.exp_table[0] = 5

    def test_rejects_bad_parameters(self):
        with self.assertRaises(NonPrime):
            field.build_field(4)
        with self.assertRaises(FieldTooLarge):
            field.build_field(2, 21)
        with self.assertRaises(ConfigError):
            field.build_field(3, 0)

    def test_reducible_modulus_rejected(self):
        with self.assertRaises(ConfigError) as cm:
            field.FieldParams(2, 2, (1, 0, 1))
        self.assertEqual(cm.exception.key, "modulus")

    def test_smallest_irreducible(self):
        self.assertEqual(field.smallest_irreducible(2, 3), (1, 0, 1, 1))
        self.assertEqual(field.smallest_irreducible(3, 2), (1, 0, 1))


class TestArithmetic(unittest.TestCase):
    def setUp(self):
        self.contexts = [field.build_field(7), field.build_field(2, 3), field.build_field(3, 2)]

    def test_scalars_come_back_as_int(self):
        ctx = field.build_field(2, 3)
        self.assertIsInstance(field.mul(ctx, 3, 5), int)
        self.assertIsInstance(field.add(ctx, 3, 5), int)
        self.assertIsInstance(field.mul(ctx, np.array([3]), 5), np.ndarray)

    def test_inverse_laws(self):
        for ctx in self.contexts:
            nz = ctx.nonzero()
            np.testing.assert_array_equal(field.mul(ctx, nz, field.inv(ctx, nz)), np.ones(ctx.q - 1))
            xs = ctx.elements()
            np.testing.assert_array_equal(field.add(ctx, xs, field.neg(ctx, xs)), np.zeros(ctx.q))
            np.testing.assert_array_equal(field.div(ctx, nz, nz), np.ones(ctx.q - 1))

    def test_mul_is_the_polynomial_product_mod_the_modulus(self):
        for ctx in (field.build_field(2, 3), field.build_field(3, 3)):
            p, n, modulus = ctx.p, ctx.n, ctx.params.modulus
            for a in range(ctx.q):
                for b in range(ctx.q):
                    product = [0] * (2 * n - 1)
                    for i, x in enumerate(field.to_coeffs(ctx, a)):
                        for j, y in enumerate(field.to_coeffs(ctx, b)):
                            product[i + j] = (product[i + j] + x * y) % p
                    # reduce by the monic modulus from the top degree down
                    for top in range(2 * n - 2, n - 1, -1):
                        lead = product[top]
                        for k in range(n + 1):
                            product[top - n + k] = (product[top - n + k] - lead * modulus[k]) % p
                    self.assertEqual(field.mul(ctx, a, b), field.from_coeffs(ctx, product[:n]), msg=(a, b))

    def test_power_and_frobenius(self):
        for ctx in self.contexts:
            xs = ctx.elements()
            np.testing.assert_array_equal(field.power(ctx, xs, ctx.q), xs)
            fixed = xs[field.frobenius(ctx, xs) == xs]
            np.testing.assert_array_equal(fixed, np.arange(ctx.p))

    def test_negative_power(self):
        ctx = field.build_field(11)
        self.assertEqual(field.power(ctx, 2, -1), 6)
        self.assertEqual(field.power(ctx, 0, 0), 1)

    def test_scale_reduces_scalar(self):
        ctx = field.build_field(3, 2)
        self.assertEqual(field.scale(ctx, 4, 5), 5)
        self.assertEqual(field.scale(ctx, 2, 5), field.add(ctx, 5, 5))

    def test_division_by_zero(self):
        ctx = field.build_field(7)
        with self.assertRaises(DivisionByZero):
            field.inv(ctx, 0)
        with self.assertRaises(DivisionByZero):
            field.dlog(ctx, np.array([1, 0]))
        with self.assertRaises(ZeroDivisionError):
            field.div(ctx, 3, 0)

    def test_trace_is_balanced(self):
        ctx = field.build_field(2, 4)
        counts = np.bincount(field.trace(ctx, ctx.elements()), minlength=2)
        self.assertEqual(counts.tolist(), [8, 8])


class TestSubfieldsAndCoefficients(unittest.TestCase):
    def test_subfield(self):
        ctx = field.build_field(2, 4)
        self.assertEqual(field.subfield(ctx, 2).size, 4)
        self.assertEqual(field.subfield(ctx, 1).tolist(), [0, 1])
        with self.assertRaises(BadArgument):
            field.subfield(ctx, 3)

    def test_coefficient_round_trip(self):
        ctx = field.build_field(3, 3)
        self.assertEqual(field.to_coeffs(ctx, 5), [2, 1, 0])
        self.assertEqual(field.from_coeffs(ctx, [2, 1]), 5)
        with self.assertRaises(BadArgument):
            field.from_coeffs(ctx, [1, 1, 1, 1])

    def test_format_poly(self):
        self.assertEqual(field.format_poly((1, 0, 2, 1)), "X^3 + 2X^2 + 1")
        self.assertEqual(field.format_poly(()), "0")
