from typing import List, Sequence, Tuple

import numpy as np

from corpus.csv_store import change, expect_header, fetchall, format_real, parse_real
from corpus.data_objects import CompoundRecord, PerceptRecord, map_to_objects
from defaults import PERCEPT_MAX, PERCEPT_MIN
from errors import DimensionMismatchError, DuplicateIdError, ParseError, UnknownCompoundError


def load_percepts(path: str) -> List[PerceptRecord]:
    '''
    Reads percepts.csv (id,d1,...,dl); scores are percentages of applicability.
    '''
    table = fetchall(path)
    expect_header(table, ['id'], exact=False)
    descriptors = table.header[1:]
    if not descriptors:
        raise ParseError('no descriptor columns after id', path, 1)

    rows = []
    seen = set()
    for line, cells in table.rows:
        if cells[0] in seen:
            raise DuplicateIdError(cells[0], path, line)
        seen.add(cells[0])
        scores = []
        for cell, column in zip(cells[1:], descriptors):
            score = parse_real(cell, path, line, column)
            if not PERCEPT_MIN <= score <= PERCEPT_MAX:
                raise ParseError(f'score {score} outside [{PERCEPT_MIN:g}, {PERCEPT_MAX:g}]', path, line, column)
            scores.append(score)
        rows.append({'id': cells[0], 'scores': np.array(scores)})

    return map_to_objects(rows, PerceptRecord)


def load_descriptors(path: str) -> List[str]:
    return fetchall(path, allow_empty=True).header[1:]


def save_percepts(path: str, records: Sequence[PerceptRecord], descriptors: Sequence[str] = None):
    l = len(records[0].scores) if records else 0
    if descriptors is None:
        descriptors = [f'd{i + 1}' for i in range(l)]
    rows = [[record.id] + [format_real(value) for value in record.scores] for record in records]
    change(path, ['id'] + list(descriptors), rows)


def training_matrices(compounds: Sequence[CompoundRecord], percepts: Sequence[PerceptRecord]) -> Tuple[np.ndarray, np.ndarray, List[str]]:
    '''
    Pairs compounds with their percepts by id and returns (X k x n, Y l x n, ids) in compound order.
    '''
    scores = {record.id: record.scores for record in percepts}
    missing = [record.id for record in compounds if record.id not in scores]
    if missing:
        raise UnknownCompoundError(missing)
    extra = set(scores) - {record.id for record in compounds}
    if extra:
        raise DimensionMismatchError(f'Percepts for compounds without features: {", ".join(sorted(extra))}')

    ids = [record.id for record in compounds]
    x = np.column_stack([record.features for record in compounds])
    y = np.column_stack([scores[compound_id] for compound_id in ids])
    return x, y, ids


def save_percept_vector(path: str, descriptors: Sequence[str], percept: np.ndarray):
    '''
    Writes one percept as descriptor,score rows.
    '''
    change(path, ['descriptor', 'score'], [[name, format_real(value)] for name, value in zip(descriptors, percept)])


def load_percept_vector(path: str, descriptors: Sequence[str]) -> np.ndarray:
    '''
    Reads descriptor,score rows and orders them by descriptors.
    '''
    table = fetchall(path)
    expect_header(table, ['descriptor', 'score'])
    scores = {}
    for line, cells in table.rows:
        if cells[0] in scores:
            raise DuplicateIdError(cells[0], path, line)
        scores[cells[0]] = parse_real(cells[1], path, line, 'score')
    if set(scores) != set(descriptors):
        raise DimensionMismatchError(f'{path}: descriptors do not match the map ({len(scores)} given, {len(descriptors)} expected).')
    return np.array([scores[name] for name in descriptors])
