import unittest

from cli_utils import basename, parse_grid
from errors import InvalidConfigError


class TestCliUtils(unittest.TestCase):

    def test_parse_grid(self):
        # log grids
        grid = parse_grid('1e-2:1e6:log9')
        self.assertEqual(len(grid), 9)
        self.assertAlmostEqual(grid[0], 1e-2)
        self.assertAlmostEqual(grid[4], 1e2)
        self.assertAlmostEqual(grid[-1], 1e6)

        # linear grids
        self.assertEqual(parse_grid('0:1:lin3'), [0.0, 0.5, 1.0])

        # explicit lists
        self.assertEqual(parse_grid('0.1, 1,10'), [0.1, 1.0, 10.0])
        self.assertEqual(parse_grid('5'), [5.0])

        # invalid grids
        self.assertRaises(InvalidConfigError, parse_grid, '10,1')
        self.assertRaises(InvalidConfigError, parse_grid, '1,1')
        self.assertRaises(InvalidConfigError, parse_grid, '0:1:log3')
        self.assertRaises(InvalidConfigError, parse_grid, '1:10:log0')
        self.assertRaises(InvalidConfigError, parse_grid, 'a,b')
        self.assertRaises(InvalidConfigError, parse_grid, ' , ')

    def test_basename(self):
        self.assertEqual(basename('/tmp/run/map.json'), 'map.json')
        self.assertEqual(basename('map.json'), 'map.json')
        self.assertIsNone(basename(None))
