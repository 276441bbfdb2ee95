"""MUD file analysis engine: parse RFC 8520 profiles, merge and prune ACEs,
and emit a device-connectivity graph for pre-deployment review."""

from mudscope.model import (
    ANY,
    Ace,
    AceEndpoint,
    ControllerPromise,
    DeviceProfile,
    Direction,
    EndpointKind,
    LayerKind,
    LayerValue,
    ProtocolStack,
    Universe,
    concretize,
)

__version__ = "0.1.0"

__all__ = [
    "ANY",
    "Ace",
    "AceEndpoint",
    "ControllerPromise",
    "DeviceProfile",
    "Direction",
    "EndpointKind",
    "LayerKind",
    "LayerValue",
    "ProtocolStack",
    "Universe",
    "concretize",
    "__version__",
]
