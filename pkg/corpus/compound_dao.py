from typing import List, Sequence

import numpy as np

from corpus.csv_store import change, expect_header, fetchall, format_real, parse_real
from corpus.data_objects import CompoundRecord, Dictionary, map_to_objects
from errors import DuplicateIdError, ParseError


def load_compounds(path: str) -> List[CompoundRecord]:
    '''
    Reads compounds.csv (id,name,f1,...,fk).
    '''
    table = fetchall(path)
    expect_header(table, ['id', 'name'], exact=False)
    feature_names = table.header[2:]
    if not feature_names:
        raise ParseError('no feature columns after id,name', path, 1)

    rows = []
    seen = set()
    for line, cells in table.rows:
        compound_id = cells[0]
        if compound_id == '':
            raise ParseError('empty id', path, line, 'id')
        if compound_id in seen:
            raise DuplicateIdError(compound_id, path, line)
        seen.add(compound_id)
        features = [parse_real(cell, path, line, column) for cell, column in zip(cells[2:], feature_names)]
        rows.append({'id': compound_id, 'name': cells[1], 'features': np.array(features)})

    return map_to_objects(rows, CompoundRecord)


def load_feature_names(path: str) -> List[str]:
    return fetchall(path, allow_empty=True).header[2:]


def save_compounds(path: str, records: Sequence[CompoundRecord], feature_names: Sequence[str] = None):
    k = len(records[0].features) if records else 0
    if feature_names is None:
        feature_names = [f'f{i + 1}' for i in range(k)]
    rows = [[record.id, record.name] + [format_real(value) for value in record.features] for record in records]
    change(path, ['id', 'name'] + list(feature_names), rows)


def build_dictionary(records: Sequence[CompoundRecord], feature_names: Sequence[str] = None) -> Dictionary:
    features = np.column_stack([record.features for record in records]) if records else np.zeros((0, 0))
    return Dictionary([record.id for record in records], features, [record.name for record in records], feature_names)


def load_dictionary(path: str) -> Dictionary:
    '''
    A dictionary file uses the compounds.csv format.
    '''
    return build_dictionary(load_compounds(path), load_feature_names(path))


def save_dictionary(path: str, dictionary: Dictionary):
    records = [CompoundRecord(compound_id, name, dictionary.features[:, j]) for j, (compound_id, name) in enumerate(zip(dictionary.ids, dictionary.names))]
    save_compounds(path, records, dictionary.feature_names)
