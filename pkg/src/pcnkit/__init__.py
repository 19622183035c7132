"""Protein contact networks: construction, static statistics, null models and link-addition dynamics."""

__version__ = "0.1.0"

from .network import (  # noqa: E402
    ContactNetwork,
    LatticeSpec,
    LinkPartition,
    build_contact_network,
    link_density,
    load_network,
    make_lattice,
    partition_links,
    save_network,
    subnetwork,
)
from .pdb import CalphaTrace, ResidueRecord, fetch_pdb, parse_calpha_trace, validate_trace  # noqa: E402

__all__ = [
    "CalphaTrace", "ContactNetwork", "LatticeSpec", "LinkPartition", "ResidueRecord",
    "build_contact_network", "fetch_pdb", "link_density", "load_network", "make_lattice",
    "parse_calpha_trace", "partition_links", "save_network", "subnetwork", "validate_trace",
]
