from typing import Iterable, Optional

import exit_codes


class OlfactError(Exception):
    '''
    Base class of every error the library raises. The CLI maps it to an exit code.
    '''
    exit_code = exit_codes.INPUT_ERROR


class ParseError(OlfactError):

    def __init__(self, message: str, path: str = None, row: int = None, column: Optional[str] = None):
        location = ''
        if path is not None:
            location = f'{path}'
            if row is not None:
                location += f':{row}'
            if column is not None:
                location += f' [{column}]'
            location += ': '
        super().__init__(f'{location}{message}')
        self.path = path
        self.row = row
        self.column = column


class DimensionMismatchError(OlfactError):
    pass


class DuplicateIdError(OlfactError):

    def __init__(self, duplicate_id: str, path: str = None, row: int = None):
        where = f' ({path}:{row})' if path is not None else ''
        super().__init__(f'Duplicate id {duplicate_id}{where}.')
        self.duplicate_id = duplicate_id


class UnknownCompoundError(OlfactError):

    def __init__(self, ids: Iterable[str]):
        self.ids = sorted(set(ids))
        super().__init__(f'Unknown compound id(s): {", ".join(self.ids)}')


class NonFiniteError(OlfactError):
    pass


class DegenerateDataError(OlfactError):
    pass


class NoConvergenceError(OlfactError):
    exit_code = exit_codes.SOLVER_ERROR

    def __init__(self, message: str, kkt_residual: float, iterations: int):
        super().__init__(f'{message} (kkt residual {kkt_residual:.3e} after {iterations} iterations)')
        self.kkt_residual = kkt_residual
        self.iterations = iterations


class InvalidConfigError(OlfactError):
    exit_code = exit_codes.CONFIG_ERROR


class FrozenCoordinateError(InvalidConfigError):

    def __init__(self, frozen: Iterable[str]):
        self.frozen = list(frozen)
        super().__init__(f'Initial weights must be strictly positive; frozen coordinate(s): {", ".join(self.frozen)}')
