import hashlib
import logging
import os
from pathlib import Path

import numpy as np
import yaml

from crhlab.crherrors import ChecksumError, NonFiniteError

logger = logging.getLogger(__name__)

FORMAT = 'crhlab-matrix-1'
BLOCKS_FILE = 'blocks.bin'
MANIFEST_FILE = 'manifest.yaml'
DTYPE = np.dtype('<f8')


def _replace_atomic(path: Path, data: bytes):
    tmp = path.with_name(path.name + '.tmp')
    with open(tmp, 'wb') as handle:
        handle.write(data)
    os.replace(tmp, path)


def write_blocks(directory, blocks: dict[str, np.ndarray], extra: dict | None = None) -> Path:
    """
    Write matrices as little-endian float64 row-major blocks into one file, with a
    manifest entry (key, shape, byte offset, sha256) per block. The manifest is
    written last, so a directory with a manifest is complete.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    payload = bytearray()
    for key, matrix in blocks.items():
        array = np.ascontiguousarray(np.asarray(matrix, dtype=DTYPE))
        if not np.all(np.isfinite(array)):
            raise NonFiniteError(f"block {key} has non-finite entries")
        data = array.tobytes(order='C')
        entries.append({'key': key, 'shape': list(array.shape), 'offset': len(payload),
                        'sha256': hashlib.sha256(data).hexdigest()})
        payload.extend(data)

    _replace_atomic(directory / BLOCKS_FILE, bytes(payload))
    manifest = {'format': FORMAT, 'blocks': entries}
    if extra:
        manifest.update(extra)
    _replace_atomic(directory / MANIFEST_FILE, yaml.safe_dump(manifest, sort_keys=False).encode('utf-8'))
    return directory


def read_manifest(directory) -> dict:
    with open(Path(directory) / MANIFEST_FILE, 'r', encoding='utf-8') as handle:
        return yaml.safe_load(handle)


def read_blocks(directory, verify: bool = True) -> tuple[dict[str, np.ndarray], dict]:
    directory = Path(directory)
    manifest = read_manifest(directory)
    if manifest.get('format') != FORMAT:
        raise ValueError(f"{directory}: unknown matrix format {manifest.get('format')!r}")
    payload = (directory / BLOCKS_FILE).read_bytes()
    blocks = {}
    for entry in manifest['blocks']:
        shape = tuple(entry['shape'])
        size = int(np.prod(shape)) * DTYPE.itemsize
        data = payload[entry['offset']:entry['offset'] + size]
        if verify and hashlib.sha256(data).hexdigest() != entry['sha256']:
            raise ChecksumError(f"{directory}: checksum mismatch for block {entry['key']}")
        blocks[entry['key']] = np.frombuffer(data, dtype=DTYPE).reshape(shape).astype(np.float64)
    return blocks, manifest


def dump_dataset(directory, x: np.ndarray, y: np.ndarray, **fields) -> Path:
    """Dataset dump (inputs X, targets Y) in the matrix exchange format."""
    return write_blocks(directory, {'X': x, 'Y': y}, extra={'dataset': fields} if fields else None)
