import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from corpus.csv_store import change, expect_header, fetchall, format_real, parse_real
from corpus.data_objects import Dictionary, IngredientTable
from defaults import TRACE_CONCENTRATION
from errors import DuplicateIdError, ParseError, UnknownCompoundError

LOGGER = logging.getLogger('olfact')

HEADER = ['ingredient_id', 'compound_id', 'concentration']
RANGE_SEPARATOR = '..'


def parse_concentration(cell: str, path: str = None, row: int = None) -> Optional[float]:
    '''
    Reads a concentration: a number, a "lo..hi" range (midpoint) or "trace". An empty cell means no value is listed.
    '''
    if cell == '':
        return None
    if cell.lower() == 'trace':
        return TRACE_CONCENTRATION
    if RANGE_SEPARATOR in cell:
        low_text, high_text = cell.split(RANGE_SEPARATOR, 1)
        low = parse_real(low_text, path, row, 'concentration')
        high = parse_real(high_text, path, row, 'concentration')
        if low > high:
            raise ParseError(f'range {cell} is reversed', path, row, 'concentration')
        value = (low + high) / 2.0
    else:
        value = parse_real(cell, path, row, 'concentration')
    if value < 0:
        raise ParseError(f'negative concentration {cell}', path, row, 'concentration')
    return value


def load_ingredients(path: str, dictionary: Dictionary, min_coverage: float = 0.0) -> IngredientTable:
    '''
    Reads ingredients.csv (long form) into a table over the dictionary's compounds with unit-norm columns.

    With min_coverage of 0 every row must name a dictionary compound and carry a concentration.
    Otherwise an ingredient is kept when at least min_coverage of its listed compounds resolve and carry a
    concentration; the rows that do not are dropped.
    '''
    table = fetchall(path)
    expect_header(table, HEADER)

    listed: Dict[str, List[Tuple[int, str, Optional[float]]]] = {}
    seen = set()
    for line, (ingredient_id, compound_id, concentration) in table.rows:
        if (ingredient_id, compound_id) in seen:
            raise DuplicateIdError(f'{ingredient_id}/{compound_id}', path, line)
        seen.add((ingredient_id, compound_id))
        listed.setdefault(ingredient_id, []).append((line, compound_id, parse_concentration(concentration, path, line)))

    strict = min_coverage <= 0
    if strict:
        unknown = [compound_id for rows in listed.values() for _, compound_id, _ in rows if compound_id not in dictionary.index]
        if unknown:
            raise UnknownCompoundError(unknown)
        for ingredient_id, rows in listed.items():
            for line, _, value in rows:
                if value is None:
                    raise ParseError(f'no concentration listed for {ingredient_id}', path, line, 'concentration')

    kept_ids = []
    columns = []
    for ingredient_id, rows in listed.items():
        usable = [(line, compound_id, value) for line, compound_id, value in rows if compound_id in dictionary.index and value is not None]
        coverage = len(usable) / len(rows)
        if not usable or coverage < min_coverage:
            LOGGER.info(f'Dropping ingredient {ingredient_id}: coverage {coverage:.2f} below {min_coverage:.2f}.')
            continue
        column = np.zeros(dictionary.n)
        for _, compound_id, value in usable:
            column[dictionary.index[compound_id]] = value
        if not np.any(column > 0):
            raise ParseError(f'ingredient {ingredient_id} has no positive concentration', path, rows[0][0], 'concentration')
        kept_ids.append(ingredient_id)
        columns.append(column)

    if not kept_ids:
        raise ParseError('no ingredient passed the coverage filter', path)

    LOGGER.info(f'Loaded {len(kept_ids)} of {len(listed)} ingredients from {path}.')
    return IngredientTable(kept_ids, dictionary.ids, np.column_stack(columns)).normalized()


def save_ingredients(path: str, ingredients: IngredientTable):
    rows = []
    for j, ingredient_id in enumerate(ingredients.ingredient_ids):
        for i in np.flatnonzero(ingredients.weights[:, j] > 0):
            rows.append([ingredient_id, ingredients.compound_ids[i], format_real(ingredients.weights[i, j])])
    change(path, HEADER, rows)


def save_ingredient_rows(path: str, rows: Sequence[Tuple[str, str, str]]):
    '''
    Writes raw long-form rows, concentrations as text (ranges and "trace" allowed).
    '''
    change(path, HEADER, [list(row) for row in rows])
