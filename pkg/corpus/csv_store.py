import logging
import math
from typing import List, Sequence, Tuple

import pandas as pd

from errors import DimensionMismatchError, ParseError

LOGGER = logging.getLogger('olfact')


class Table:

    def __init__(self, path: str, header: List[str], rows: List[Tuple[int, List[str]]]):
        self.path = path
        self.header = header
        self.rows = rows


def _is_blank(cells) -> bool:
    return all(not isinstance(cell, str) or cell.strip() == '' for cell in cells)


def fetchall(path: str, allow_empty: bool = False) -> Table:
    '''
    Reads a CSV file into its header and (line number, cells) rows. Every cell stays text; rows whose arity
    differs from the header are rejected.
    '''
    try:
        # header=None and kept blank lines: frame position i is file line i + 1
        frame = pd.read_csv(path, header=None, dtype=str, keep_default_na=False, skip_blank_lines=False, encoding='utf-8-sig')
    except pd.errors.EmptyDataError:
        raise ParseError('file is empty', path)
    except pd.errors.ParserError as error:
        raise DimensionMismatchError(f'{path}: {error}')

    header = None
    rows = []
    for position, cells in enumerate(frame.itertuples(index=False, name=None)):
        if _is_blank(cells):
            continue
        line = position + 1
        # fields missing at the end of a short row come back as NaN
        present = [cell.strip() for cell in cells if isinstance(cell, str)]
        if header is None:
            header = present
            continue
        if len(present) != len(header):
            raise DimensionMismatchError(f'{path}:{line}: expected {len(header)} fields, found {len(present)}.')
        rows.append((line, present))

    if header is None:
        raise ParseError('file is empty', path)
    if not rows and not allow_empty:
        raise ParseError('file has a header but no data rows', path)

    LOGGER.info(f'Read {len(rows)} rows from {path}.')
    return Table(path, header, rows)


def expect_header(table: Table, expected: Sequence[str], exact: bool = True):
    '''
    Checks the leading header cells (all of them when exact).
    '''
    actual = table.header if exact else table.header[:len(expected)]
    if list(actual) != list(expected):
        raise ParseError(f'expected header {",".join(expected)}{"" if exact else ",..."}, found {",".join(table.header)}', table.path, 1)


def parse_real(cell: str, path: str, row: int, column: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(f'"{cell}" is not a number', path, row, column)
    if not math.isfinite(value):
        raise ParseError(f'"{cell}" is not finite', path, row, column)
    return value


def format_real(value: float) -> str:
    '''
    Shortest text that reads back to the same double.
    '''
    return repr(float(value))


def change(path: str, header: Sequence[str], rows: Sequence[Sequence]):
    '''
    Writes header and rows, replacing the file. Cells are written as given, so reals should come formatted.
    '''
    frame = pd.DataFrame([list(row) for row in rows], columns=list(header), dtype=object)
    frame.to_csv(path, index=False, lineterminator='\n', encoding='utf-8')
    LOGGER.info(f'Wrote {len(rows)} rows to {path}.')
