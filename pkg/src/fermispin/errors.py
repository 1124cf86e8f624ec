"""Exception types shared by every module."""


class InvalidArgumentError(ValueError):
    """Bad particle count, malformed mask/bipartition, mismatched sizes."""


class ResourceLimitError(RuntimeError):
    """The requested size is past a configured limit."""

    def __init__(self, message, *, n=None, max_n=None, bytes_estimate=None):
        super().__init__(message)
        self.n = n
        self.max_n = max_n
        self.bytes_estimate = bytes_estimate


class UnsupportedSizeError(ResourceLimitError):
    """Brute-force oracle asked for a size it refuses to attempt."""


class DomainError(ValueError):
    """Input is outside the mathematical domain of the operation."""


def dense_bytes(n):
    # int64 numerators plus the float64 view
    return 16 * 4**n


def format_bytes(nbytes):
    for unit in ("B", "KiB", "MiB", "GiB", "TiB"):
        if nbytes < 1024 or unit == "TiB":
            return f"{nbytes:.1f} {unit}" if unit != "B" else f"{nbytes} B"
        nbytes /= 1024
