"""Locally decodable and updatable compression for sparse binary sources."""

from .bitstore import BitStore, ProbeLedger
from .errors import (
    AddressError,
    BlockFailed,
    CapacityExceeded,
    Infeasible,
    InvalidParams,
    LDCodecError,
    LengthError,
    MalformedContainer,
    NotTypical,
)
from .scheme import (
    Container,
    SchemeParams,
    derive_params,
    estimate_error,
    global_decode,
    global_encode,
    local_decode,
    local_update,
    rate,
)
from .sparse import SparseParams
from .subblock import SubblockParams

__version__ = "0.1.0"

__all__ = [
    "AddressError",
    "BitStore",
    "BlockFailed",
    "CapacityExceeded",
    "Container",
    "Infeasible",
    "InvalidParams",
    "LDCodecError",
    "LengthError",
    "MalformedContainer",
    "NotTypical",
    "ProbeLedger",
    "SchemeParams",
    "SparseParams",
    "SubblockParams",
    "derive_params",
    "estimate_error",
    "global_decode",
    "global_encode",
    "local_decode",
    "local_update",
    "rate",
]
