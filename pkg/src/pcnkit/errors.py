"""Exception hierarchy for pcnkit.

Data problems derive from :class:`DataError`, network and filesystem problems
from :class:`FetchError`. The CLI maps the two families onto exit codes 2 and 3.
"""


class PCNError(Exception):
    """Base class for every error raised by pcnkit."""


class DataError(PCNError, ValueError):
    """Input data is malformed or outside an operation's domain."""


class FetchError(PCNError, OSError):
    """Network or cache failure."""


# pdb ingest
class InvalidId(DataError):
    pass


class FetchFailed(FetchError):
    def __init__(self, pdb_id, status=None, reason=""):
        self.pdb_id = pdb_id
        self.status = status
        self.reason = reason
        msg = f"fetch of {pdb_id} failed"
        if status is not None:
            msg += f" (HTTP {status})"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class CacheUnwritable(FetchError):
    pass


class NoCalphaAtoms(DataError):
    pass


class MalformedRecord(DataError):
    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class SizeMismatch(DataError):
    pass


# network construction and IO
class EmptyTrace(DataError):
    pass


class TooFewNodes(DataError):
    pass


class InvalidSpec(DataError):
    pass


class PartitionMismatch(DataError):
    pass


class ParseError(DataError):
    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class VersionMismatch(DataError):
    pass


# metrics
class DomainError(DataError):
    pass


class NoEdges(DataError):
    pass


class AllPairsUnreachable(DataError):
    pass


class NoPairs(DataError):
    pass


class ZeroVariance(DataError):
    pass


class LengthMismatch(DataError):
    pass


# rewiring
class TooFewEligibleEdges(DataError):
    pass


class SwapStarvation(UserWarning):
    """Attempt cap reached before half of the swap target was applied."""


# dynamics / generative model / distributions
class NoLongRangeLinks(DataError):
    pass


class TrajectoryTooShort(DataError):
    pass


class SnapshotNotRecorded(DataError, KeyError):
    pass


class BandExhausted(DataError):
    pass


class TooFewPoints(DataError):
    pass


class NonPositiveValue(DataError):
    pass


# batch
class AllEntriesFailed(DataError):
    pass
