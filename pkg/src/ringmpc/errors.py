"""Exception types shared across the library."""


class RingmpcError(Exception):
    """Base class for all library errors."""


class DomainError(RingmpcError, ValueError):
    """A value or ring does not satisfy an operation's domain contract."""


class ShapeError(RingmpcError, ValueError):
    """Mismatched batch length, ring, or party pairing."""


class CapabilityError(RingmpcError):
    """Requested parameters exceed a configured capability limit
    (e.g. gate fan-in, whose memory cost grows as 2**fan_in)."""


class MaterialError(RingmpcError):
    """Correlated randomness missing from the session's material store."""


class MaterialReuseError(RingmpcError):
    """A one-shot piece of correlated randomness was consumed twice."""


class ProtocolDesyncError(RingmpcError):
    """The two party engines disagreed at a round barrier."""
