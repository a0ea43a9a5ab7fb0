import re
from pathlib import Path
from typing import List

import numpy as np

from errors import InvalidConfigError

GRID_FORMAT = re.compile(r'^([^:]+):([^:]+):(log|lin)(\d+)$')


def parse_grid(text: str) -> List[float]:
    '''
    Turn a grid description into a strictly increasing list of values.
    Accepts "lo:hi:logN", "lo:hi:linN" or a comma separated list such as "0.1,1,10".
    '''
    text = text.strip()
    if (found := GRID_FORMAT.match(text)) is not None:
        low, high = _to_float(found.group(1), text), _to_float(found.group(2), text)
        count = int(found.group(4))
        if count < 1:
            raise InvalidConfigError(f'Grid {text} needs at least one point.')
        if found.group(3) == 'log':
            if low <= 0 or high <= 0:
                raise InvalidConfigError(f'Log grid {text} needs positive bounds.')
            values = np.logspace(np.log10(low), np.log10(high), count)
        else:
            values = np.linspace(low, high, count)
    else:
        values = np.array([_to_float(part, text) for part in text.split(',') if part.strip() != ''])

    if len(values) == 0:
        raise InvalidConfigError(f'Grid {text} is empty.')
    if np.any(np.diff(values) <= 0):
        raise InvalidConfigError(f'Grid {text} is not strictly increasing.')
    return [float(value) for value in values]


def _to_float(part: str, text: str) -> float:
    try:
        return float(part)
    except ValueError:
        raise InvalidConfigError(f'Cannot read "{part}" in grid {text}.')


def basename(path) -> str:
    '''
    File name without directories, used in config echoes so artifacts do not depend on where they were written.
    '''
    return None if path is None else Path(path).name
