import unittest

import numpy as np

import corpus.synthetic as synthetic
from corpus.mixing import mix
from errors import InvalidConfigError


class SyntheticTest(unittest.TestCase):

    def test_same_seed_same_corpus(self):
        first = synthetic.generate_synthetic(3, 6, 5, 20, 10, 2, 0.5)
        second = synthetic.generate_synthetic(3, 6, 5, 20, 10, 2, 0.5)

        for a, b in zip(first[0], second[0]):
            self.assertEqual(a.id, b.id)
            self.assertTrue(np.array_equal(a.features, b.features))
        for a, b in zip(first[1], second[1]):
            self.assertTrue(np.array_equal(a.scores, b.scores))
        self.assertTrue(np.array_equal(first[2].features, second[2].features))
        self.assertTrue(np.array_equal(first[3], second[3]))

        other = synthetic.generate_synthetic(4, 6, 5, 20, 10, 2, 0.5)
        self.assertFalse(np.array_equal(first[3], other[3]))

    def test_noiseless_percepts_are_low_rank_images(self):
        compounds, percepts, _, a0 = synthetic.generate_synthetic(1, 10, 8, 50, 5, 3, 0.0)
        x = np.column_stack([record.features for record in compounds])
        y = np.column_stack([record.scores for record in percepts])

        inside = (y > 0) & (y < 100)
        self.assertTrue(np.allclose(y[inside], (a0 @ x)[inside]))
        self.assertTrue(np.all((y >= 0) & (y <= 100)))
        self.assertEqual(np.linalg.matrix_rank(a0), 3)

    def test_ground_truth_rank(self):
        _, _, _, a0 = synthetic.generate_synthetic(7, 18, 20, 30, 5, 4, 1.0)

        s = np.linalg.svd(a0, compute_uv=False)

        self.assertEqual(a0.shape, (20, 18))
        self.assertEqual(int(np.sum(s > 1e-6 * s[0])), 4)

    def test_ids_are_unique_cas_keys(self):
        compounds, percepts, dictionary, _ = synthetic.generate_synthetic(0, 3, 2, 120, 40, 1, 0.1)
        ids = [record.id for record in compounds] + dictionary.ids

        self.assertEqual(len(set(ids)), len(ids))
        self.assertEqual([record.id for record in percepts], [record.id for record in compounds])
        self.assertEqual(synthetic.cas_like_id(0), '100-00-5')
        body, middle, check = synthetic.cas_like_id(4217).split('-')
        digits = body + middle
        self.assertEqual(int(check), sum((i + 1) * int(d) for i, d in enumerate(reversed(digits))) % 10)

    def test_rejects_bad_config(self):
        self.assertRaises(InvalidConfigError, synthetic.generate_synthetic, 0, 3, 2, 10, 5, 3, 0.1)
        self.assertRaises(InvalidConfigError, synthetic.generate_synthetic, 0, 3, 2, 0, 5, 1, 0.1)
        self.assertRaises(InvalidConfigError, synthetic.generate_synthetic, 0, 3, 2, 10, 5, 1, -0.1)

    def test_demo_mixtures(self):
        # setup
        _, _, dictionary, a0 = synthetic.generate_synthetic(2, 6, 5, 10, 30, 2, 0.1)

        # run
        demo = synthetic.generate_demo_mixtures(2, dictionary, a0, n_malodors=4, hidden_size=21, segment_steps=50)
        again = synthetic.generate_demo_mixtures(2, dictionary, a0, n_malodors=4, hidden_size=21, segment_steps=50)

        # assert
        self.assertEqual(len(demo.malodors), 4)
        self.assertEqual(len(demo.hidden.entries), 21)
        self.assertEqual(demo.hidden.entries, again.hidden.entries)
        self.assertTrue(all(weight > 0 for _, weight in demo.hidden.entries))
        self.assertEqual(len(demo.scenario['segments']), 3)
        self.assertEqual(demo.scenario['segments'][0]['steps'], 50)
        self.assertTrue(np.allclose(demo.scenario['segments'][1]['x_in'], mix(dictionary, demo.malodors[1])))
        self.assertTrue(np.allclose(demo.target, a0 @ mix(dictionary, demo.cover, normalize=True)))
        self.assertTrue(all(compound_id in dictionary.index for _, compound_id, _ in demo.ingredient_rows))
