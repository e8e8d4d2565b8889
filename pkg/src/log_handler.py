import collections
import contextlib
import logging
import threading


class MemoryLogHandler(logging.Handler):
    """In-memory buffer of log records tagged with the scenario that emitted them.

    Records carry a sequence number instead of a timestamp so report artifacts
    built from them are reproducible.
    """

    def __init__(self, maxlen: int = 10000, level: int = logging.INFO):
        super().__init__(level)
        self._lock = threading.Lock()
        self._seq = 0
        self._drained = 0
        self._records: collections.deque = collections.deque(maxlen=maxlen)
        self.scenario: str | None = None

    def emit(self, record: logging.LogRecord) -> None:
        try:
            with self._lock:
                self._seq += 1
                self._records.append({
                    "seq": self._seq,
                    "scenario": self.scenario,
                    "level": record.levelname,
                    "logger": record.name,
                    "message": record.getMessage(),
                })
        except Exception:
            self.handleError(record)

    def drain(self) -> list:
        """Return the records emitted since the previous drain."""
        with self._lock:
            fresh = [r for r in self._records if r["seq"] > self._drained]
            self._drained = self._seq
            return fresh

    @contextlib.contextmanager
    def attached(self, target: logging.Logger | None = None):
        """Capture records from *target* (the root logger by default).

        The logger's level is lowered to the handler's for the duration so
        INFO progress lines reach the buffer even under a quieter CLI setting.
        """
        target = target or logging.getLogger()
        previous = target.level
        target.addHandler(self)
        if target.getEffectiveLevel() > self.level:
            target.setLevel(self.level)
        try:
            yield self
        finally:
            target.removeHandler(self)
            target.setLevel(previous)
