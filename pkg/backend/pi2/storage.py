"""Plain-text persistence of PI2 tables.

Header lines ``# key=value`` (format version, T list, x_max, nodes,
residuals, held-out interpolation errors), then one block of (X, U) columns
per T introduced by ``# block T=<value>``. Numbers are written with 17 significant digits so the
table reads back bit for bit.
"""
from pathlib import Path

import numpy as np

from breakup.exceptions import OutputError
from .models import PI2Table
from .tabulate import assemble_spline

FORMAT_VERSION = 1
NUMBER_FORMAT = '%.17g'


def _join(values):
    return ','.join(NUMBER_FORMAT % value for value in values)


def write_table(table: PI2Table, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as handle:
        handle.write(f'# format=pi2-table\n# version={FORMAT_VERSION}\n')
        handle.write(f'# T={_join(table.T_values)}\n')
        handle.write(f'# x_max={NUMBER_FORMAT % table.x_max}\n# nodes={table.nodes}\n')
        handle.write(f'# residuals={_join(table.residuals)}\n')
        if table.held_out:
            held_T, held_error = zip(*table.held_out)
            handle.write(f'# held_out_T={_join(held_T)}\n# held_out_error={_join(held_error)}\n')
        for column, T in enumerate(table.T_values):
            handle.write(f'# block T={NUMBER_FORMAT % T}\n')
            np.savetxt(handle, np.column_stack([table.X, table.values[:, column]]),
                       fmt=NUMBER_FORMAT)
    return path


def read_table(path) -> PI2Table:
    header, blocks, current = {}, [], None
    with open(path) as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            if line.startswith('# block'):
                current = []
                blocks.append(current)
            elif line.startswith('#'):
                key, _, value = line[1:].strip().partition('=')
                header[key] = value
            elif current is None:
                raise OutputError('Data row before the first block', path=str(path))
            else:
                current.append([float(item) for item in line.split()])

    if header.get('format') != 'pi2-table' or int(header.get('version', 0)) != FORMAT_VERSION:
        raise OutputError('Not a PI2 table of a supported version', path=str(path))
    T_values = tuple(float(item) for item in header['T'].split(','))
    if len(blocks) != len(T_values):
        raise OutputError('Block count does not match the T list', path=str(path))
    arrays = [np.array(block) for block in blocks]
    X = arrays[0][:, 0]
    if any(not np.array_equal(block[:, 0], X) for block in arrays):
        raise OutputError('Blocks are not on a common X grid', path=str(path))
    values = np.column_stack([block[:, 1] for block in arrays])
    held_out = ()
    if header.get('held_out_T'):
        held_out = tuple(zip((float(item) for item in header['held_out_T'].split(',')),
                             (float(item) for item in header['held_out_error'].split(','))))
    return PI2Table(
        T_values=T_values, X=X, values=values,
        residuals=tuple(float(item) for item in header['residuals'].split(',')),
        x_max=float(header['x_max']), nodes=int(header['nodes']),
        spline=assemble_spline(X, T_values, values),
        held_out=held_out,
    )
