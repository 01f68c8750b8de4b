import math
import unittest

import numpy as np

from fq.decomp import characters, field
from fq.decomp.characters import AdditiveCharacter, MultiplicativeCharacter
from fq.decomp.exceptions import BadArgument


class TestCharacters(unittest.TestCase):
    def setUp(self):
        self.contexts = [field.build_field(7), field.build_field(2, 3), field.build_field(3, 2)]

    def test_additive_orthogonality(self):
        for ctx in self.contexts:
            for a in range(1, ctx.q):
                total = characters.additive_table(ctx, AdditiveCharacter(a)).sum()
                self.assertLess(abs(total), 1e-9 * ctx.q, f"psi_{a} over {ctx}")
            trivial = characters.additive_table(ctx, AdditiveCharacter(0)).sum()
            self.assertAlmostEqual(trivial, ctx.q)

    def test_multiplicative_orthogonality(self):
        for ctx in self.contexts:
            for j in range(1, ctx.q - 1):
                total = characters.multiplicative_table(ctx, MultiplicativeCharacter(j)).sum()
                self.assertLess(abs(total), 1e-9 * ctx.q, f"chi_{j} over {ctx}")

    def test_chi_vanishes_at_zero_even_when_trivial(self):
        ctx = field.build_field(5)
        self.assertEqual(characters.eval_multiplicative(ctx, MultiplicativeCharacter(0), 0), 0)
        self.assertEqual(characters.eval_multiplicative(ctx, MultiplicativeCharacter(1), 0), 0)
        self.assertTrue(MultiplicativeCharacter(4).is_trivial(ctx))

    def test_quadratic_character(self):
        ctx = field.build_field(7)
        chi = characters.quadratic_character(ctx)
        values = characters.eval_multiplicative(ctx, chi, np.arange(1, 7))
        np.testing.assert_allclose(values.real, [1, 1, -1, 1, -1, -1], atol=1e-12)
        with self.assertRaises(BadArgument):
            characters.quadratic_character(field.build_field(2, 2))

    def test_additive_character_is_a_homomorphism(self):
        ctx = field.build_field(3, 2)
        psi = characters.canonical_additive(ctx)
        xs = ctx.elements()
        lhs = characters.eval_additive(ctx, psi, field.add(ctx, xs[:, None], xs[None, :]))
        rhs = characters.eval_additive(ctx, psi, xs)[:, None] * characters.eval_additive(ctx, psi, xs)[None, :]
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_scalar_evaluation(self):
        ctx = field.build_field(5)
        value = characters.eval_additive(ctx, AdditiveCharacter(1), 1)
        self.assertIsInstance(value, complex)
        self.assertAlmostEqual(value, complex(math.cos(2 * math.pi / 5), math.sin(2 * math.pi / 5)))

    def test_weil_bound(self):
        self.assertAlmostEqual(characters.weil_bound(101, 3), 2 * math.sqrt(101))
        ctx = field.build_field(101)
        xs = ctx.elements()
        cubes = field.power(ctx, xs, 3)
        total = characters.complete_sum(ctx, characters.additive_table(ctx, AdditiveCharacter(1)), cubes)
        self.assertLessEqual(abs(total), characters.weil_bound(101, 3) + 1e-9)

    def test_trivial_flag(self):
        self.assertTrue(AdditiveCharacter(0).trivial)
        self.assertFalse(AdditiveCharacter(3).trivial)
        self.assertEqual(str(MultiplicativeCharacter(2)), "chi_2")
