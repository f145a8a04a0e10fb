"""Content-addressed on-disk cache for Gröbner bases.

Entries are JSON files named by the sha256 of a canonical payload that describes the ideal
(generators in canonical text form) and the order. Writes go to a temporary file in the same
directory and are renamed into place, so readers never see partial files.
"""

import json
import logging
import os
import tempfile
import threading
from collections import defaultdict
from pathlib import Path
from typing import Any, Mapping

from pslab.subprocesses.helper_functions import content_hash

logger = logging.getLogger(__name__)


class GroebnerCache:
    """Cache of serialized bases under ``directory``."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()
        self._key_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)

    def _path(self, key: str) -> Path:
        return self.directory / key[:2] / f"{key}.json"

    def key(self, payload: Mapping[str, Any]) -> str:
        return content_hash(payload)

    def load(self, payload: Mapping[str, Any]) -> dict | None:
        """Return the stored value for ``payload`` or None."""
        path = self._path(self.key(payload))
        try:
            document = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            with self._lock:
                self.misses += 1
            return None
        except (OSError, json.JSONDecodeError) as error:
            logger.warning("ignoring unreadable cache entry %s: %s", path, error)
            with self._lock:
                self.misses += 1
            return None
        if document.get("payload") != json.loads(json.dumps(payload, sort_keys=True, default=str)):
            # sha256 collision or a foreign file
            with self._lock:
                self.misses += 1
            return None
        with self._lock:
            self.hits += 1
        return document["value"]

    def store(self, payload: Mapping[str, Any], value: Mapping[str, Any]) -> None:
        """Write ``value`` for ``payload``; serialized per key."""
        key = self.key(payload)
        path = self._path(key)
        with self._lock:
            key_lock = self._key_locks[key]
        with key_lock:
            path.parent.mkdir(parents=True, exist_ok=True)
            document = {"payload": payload, "value": value}
            handle, temporary = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
            try:
                with os.fdopen(handle, "w", encoding="utf-8") as file:
                    json.dump(document, file, sort_keys=True, default=str)
                os.replace(temporary, path)
            except BaseException:
                if os.path.exists(temporary):
                    os.unlink(temporary)
                raise
        logger.debug("cached %s", key)

    def clear(self) -> None:
        for entry in self.directory.glob("*/*.json"):
            entry.unlink()
