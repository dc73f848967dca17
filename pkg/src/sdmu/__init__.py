"""Edge-based mu-representations of semidirected phylogenetic networks."""

from .cherry import Cherry, CherryError, CherryType, find_cherries_mu, find_cherries_net
from .dist import DistanceResult, mu_distance, rep_distance
from .mu import MuRepresentation, Tag, TaggedVector, canonical_serialize, mu_representation, parse_mu
from .net import Network, NetworkError, build_network, validate
from .orchard import (
    NotOrchardError,
    VerificationFailed,
    brute_force_isomorphic,
    is_orchard,
    random_orchard,
    reconstruct,
    reduce_completely,
)
from .paths import ANY_HYBRID, Leaf, count_paths, count_paths_avoiding
from .sdnet import ParseError, format_sdnet, parse_sdnet, read_sdnet, write_sdnet

__version__ = "0.1.0"

__all__ = [
    "ANY_HYBRID",
    "Cherry",
    "CherryError",
    "CherryType",
    "DistanceResult",
    "Leaf",
    "MuRepresentation",
    "Network",
    "NetworkError",
    "NotOrchardError",
    "ParseError",
    "Tag",
    "TaggedVector",
    "VerificationFailed",
    "brute_force_isomorphic",
    "build_network",
    "canonical_serialize",
    "count_paths",
    "count_paths_avoiding",
    "find_cherries_mu",
    "find_cherries_net",
    "format_sdnet",
    "is_orchard",
    "mu_distance",
    "mu_representation",
    "parse_mu",
    "parse_sdnet",
    "random_orchard",
    "read_sdnet",
    "reconstruct",
    "reduce_completely",
    "rep_distance",
    "validate",
    "write_sdnet",
]
