from corpus.csv_store import change, expect_header, fetchall, format_real, parse_real
from corpus.data_objects import MixtureSpec
from errors import DuplicateIdError, ParseError


def load_mixture(path: str) -> MixtureSpec:
    '''
    Reads mixture.csv (id,weight).
    '''
    table = fetchall(path)
    expect_header(table, ['id', 'weight'])

    entries = []
    seen = set()
    for line, cells in table.rows:
        if cells[0] in seen:
            raise DuplicateIdError(cells[0], path, line)
        seen.add(cells[0])
        weight = parse_real(cells[1], path, line, 'weight')
        if weight < 0:
            raise ParseError(f'negative weight {weight}', path, line, 'weight')
        entries.append((cells[0], weight))

    if not any(weight > 0 for _, weight in entries):
        raise ParseError('mixture has no positive weight', path)
    return MixtureSpec(entries)


def save_mixture(path: str, mixture: MixtureSpec):
    change(path, ['id', 'weight'], [[compound_id, format_real(weight)] for compound_id, weight in mixture.entries])
