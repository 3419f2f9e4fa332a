"""Backend switch for the numeric kernels.

Every hot kernel in the package is plain scalar Python that numba can compile.
By default the kernels are wrapped with ``numba.njit``; setting the environment
variable ``CONICP3P_DISABLE_NUMBA=1`` before import leaves them as ordinary
Python functions (the pure-numpy fallback path). The flag is read once.

Compiled kernels are cached on disk. numba only invalidates a cache entry
when the defining file changes, not when a kernel it calls from another
module does, so the cache lives in a directory keyed by a hash of the whole
package source.
"""

import hashlib
import os
import pathlib
import tempfile

_FLAG = "CONICP3P_DISABLE_NUMBA"
_CACHE_FLAG = "CONICP3P_CACHE_DIR"


def _numba_requested():
    value = os.environ.get(_FLAG, "").strip().lower()
    return value not in ("1", "true", "yes", "on")


def _source_digest():
    h = hashlib.sha1()
    pkg = pathlib.Path(__file__).resolve().parent
    for path in sorted(pkg.rglob("*.py")):
        h.update(path.relative_to(pkg).as_posix().encode())
        h.update(path.read_bytes())
    return h.hexdigest()[:16]


def _cache_dir():
    root = os.environ.get(_CACHE_FLAG)
    if root is None:
        base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
        root = os.path.join(base, "conicp3p")
    path = os.path.join(root, _source_digest())
    try:
        os.makedirs(path, exist_ok=True)
    except OSError:
        path = os.path.join(tempfile.gettempdir(), "conicp3p-" + _source_digest())
        os.makedirs(path, exist_ok=True)
    return path


USE_NUMBA = _numba_requested()

if USE_NUMBA:
    try:
        import numba
        from numba.core import config as _numba_config
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False

if USE_NUMBA:
    _CACHE_DIR = _cache_dir()

    def _compile(func, options):
        options.setdefault("cache", True)
        saved = _numba_config.CACHE_DIR
        _numba_config.CACHE_DIR = _CACHE_DIR
        try:
            return numba.njit(**options)(func)
        finally:
            _numba_config.CACHE_DIR = saved

    def kernel(func=None, **options):
        """Compile ``func`` in nopython mode (optionally with extra options)."""
        if func is None:
            return lambda f: _compile(f, options)
        return _compile(func, options)

else:

    def kernel(func=None, **options):
        if func is None:
            return lambda f: f
        return func


BACKEND = "numba" if USE_NUMBA else "python"
