"""Wang tilesets as transducers: composition, loops and robustness certificates."""

from .core import (
    Edge,
    LazyPower,
    MetaTransducer,
    Tile,
    WangTileset,
    compose,
    compose_paths,
    from_tileset,
    path_accepts,
    power,
    submodels,
    to_tileset,
    trim,
    union,
)
from .loops import (
    Loop,
    RectangularPattern,
    classify_loop,
    compatible,
    cyclic_to_periodic,
    find_loop,
    find_periodic_loop,
    loop_to_strip,
)
from .certify import (
    CertificateVerified,
    NoTiling,
    PeriodicTiling,
    RobustnessCertificate,
    StepBudget,
    Unknown,
    domino_driver,
    verify_certificate,
)

__all__ = [
    "CertificateVerified",
    "Edge",
    "LazyPower",
    "Loop",
    "MetaTransducer",
    "NoTiling",
    "PeriodicTiling",
    "RectangularPattern",
    "RobustnessCertificate",
    "StepBudget",
    "Tile",
    "Unknown",
    "WangTileset",
    "classify_loop",
    "compatible",
    "compose",
    "compose_paths",
    "cyclic_to_periodic",
    "domino_driver",
    "find_loop",
    "find_periodic_loop",
    "from_tileset",
    "loop_to_strip",
    "path_accepts",
    "power",
    "submodels",
    "to_tileset",
    "trim",
    "union",
    "verify_certificate",
]
