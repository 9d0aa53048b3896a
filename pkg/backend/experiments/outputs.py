"""Result files of an experiment.

Layout of a run directory::

    metadata.env              KEY="value" pairs, readable with dotenv
    tables/<name>.dat         '# columns a b c' header, then rows
    runs/<label>/snapshot_NNN.dat, energy.dat, mass.dat, linf.dat, tails.dat
    pi2_<name>.dat            PI2 tables in the pi2 storage format

Every file is written to a temporary sibling and moved into place, so a
reader never sees a half-written file. Numbers use 17 significant digits and
read back bit for bit. metadata.env is written last.
"""
import logging
import os
import re
import tempfile
from contextlib import contextmanager
from pathlib import Path

import numpy as np
from django.conf import settings
from dotenv import dotenv_values

from breakup.exceptions import OutputError
from pi2.storage import write_table
from .models import Table
from .serializers import RunConfigSerializer

logger = logging.getLogger(__name__)

NUMBER_FORMAT = '%.17g'
METADATA_FILE = 'metadata.env'


@contextmanager
def atomic_write(path):
    """Open a temporary file next to ``path``; it replaces ``path`` only if the block succeeds."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        handle = tempfile.NamedTemporaryFile('w', dir=path.parent, prefix=f'.{path.name}.',
                                             suffix='.tmp', delete=False)
    except OSError as exc:
        raise OutputError('Cannot create output file', path=str(path), reason=str(exc))
    try:
        with handle:
            yield handle
        os.replace(handle.name, path)
    except BaseException as exc:
        Path(handle.name).unlink(missing_ok=True)
        if isinstance(exc, OSError):
            raise OutputError('Cannot write output file', path=str(path), reason=str(exc))
        raise


def write_columns(path, table: Table, header=None):
    with atomic_write(path) as handle:
        for key, value in (header or {}).items():
            handle.write(f'# {key}={_format(value)}\n')
        handle.write(f"# columns {' '.join(table.columns)}\n")
        for row in table.data:
            handle.write(' '.join(NUMBER_FORMAT % value for value in row) + '\n')
    return Path(path)


def read_columns(path):
    """(Table, header) from a file written by write_columns."""
    header, columns, rows = {}, None, []
    try:
        with open(path) as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                if line.startswith('# columns'):
                    columns = tuple(line[len('# columns'):].split())
                elif line.startswith('#'):
                    key, _, value = line[1:].strip().partition('=')
                    header[key] = value
                else:
                    rows.append([float(item) for item in line.split()])
    except OSError as exc:
        raise OutputError('Cannot read output file', path=str(path), reason=str(exc))
    if columns is None:
        raise OutputError('Missing column header', path=str(path))
    if any(len(row) != len(columns) for row in rows):
        raise OutputError('Row length does not match the column header', path=str(path))
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(columns)))
    return Table(columns, data), header


def _format(value):
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        return NUMBER_FORMAT % value
    if isinstance(value, (list, tuple, np.ndarray)):
        return ','.join(_format(item) for item in value)
    if value is None:
        return ''
    return str(getattr(value, 'value', value))


def _key(*parts):
    return re.sub(r'[^A-Z0-9]+', '_', '_'.join(str(part) for part in parts).upper()).strip('_')


def _quote(value):
    text = _format(value)
    return '"' + text.replace('\\', '\\\\').replace('"', '\\"').replace('\n', '\\n') + '"'


def metadata_entries(result):
    entries = {
        'EXPERIMENT': result.experiment,
        'STATUS': result.status,
        'MESSAGE': result.message,
    }
    for key, value in RunConfigSerializer(result.config).data.items():
        entries[_key('CONFIG', key)] = value
    for key, value in settings.LAB.items():
        entries[_key('LAB', key)] = value
    for key, value in result.metadata.items():
        entries[_key('META', key)] = value
    for name, fit in result.fits.items():
        for key, value in fit.as_dict().items():
            entries[_key('FIT', name, key)] = value
    for label, record in result.records.items():
        entries.update({
            _key('RUN', label, 'STATUS'): record.status,
            _key('RUN', label, 'STEPS'): record.steps,
            _key('RUN', label, 'FINAL_TIME'): record.final_time,
            _key('RUN', label, 'ENERGY_DRIFT'): record.max_energy_drift,
            _key('RUN', label, 'MASS_DRIFT'): record.max_mass_drift,
            _key('RUN', label, 'FLAGS'): list(record.flags),
            _key('RUN', label, 'INTEGRATOR'): record.integrator,
            _key('RUN', label, 'MESSAGE'): record.message,
            _key('RUN', label, 'SNAPSHOT_TIMES'): [t for t, _ in record.snapshots],
        })
    return entries


def write_metadata(result, directory):
    path = Path(directory) / METADATA_FILE
    with atomic_write(path) as handle:
        for key, value in metadata_entries(result).items():
            handle.write(f'{key}={_quote(value)}\n')
    return path


def read_metadata(directory):
    path = Path(directory) / METADATA_FILE
    if not path.is_file():
        raise OutputError('No metadata file in the run directory', path=str(path))
    return dotenv_values(path, interpolate=False)


def _write_record(record, directory):
    for index, (t, u) in enumerate(record.snapshots):
        write_columns(directory / f'snapshot_{index:03d}.dat',
                      Table.from_columns(x=u.grid.nodes, u=u.values), header={'t': t})
    if record.energy:
        write_columns(directory / 'energy.dat', Table.from_columns(
            t=[item.t for item in record.energy], energy=[item.energy for item in record.energy],
            drift=[item.drift for item in record.energy]))
    for name in ('mass', 'linf', 'tails'):
        series = getattr(record, name)
        if series:
            times, values = zip(*series)
            write_columns(directory / f'{name}.dat', Table.from_columns(t=times, value=values))


def _write_pi2(table, path):
    temporary = path.with_name(f'.{path.name}.tmp')
    try:
        write_table(table, temporary)
        os.replace(temporary, path)
    except OSError as exc:
        temporary.unlink(missing_ok=True)
        raise OutputError('Cannot write PI2 table', path=str(path), reason=str(exc))


def emit_outputs(result, directory):
    """Write everything in ``result`` below ``directory``; returns the metadata path."""
    directory = Path(directory)
    for name, table in result.tables.items():
        write_columns(directory / 'tables' / f'{name}.dat', table)
    for label, record in result.records.items():
        _write_record(record, directory / 'runs' / label)
    for name, table in result.pi2_tables.items():
        _write_pi2(table, directory / f'pi2_{name}.dat')
    path = write_metadata(result, directory)
    logger.info('Wrote %d table(s), %d run(s), %d PI2 table(s) to %s', len(result.tables),
                len(result.records), len(result.pi2_tables), directory)
    return path
