"""Exact arithmetic for nonnegative matrix semigroups over ordered rings, and
a black-box decomposition of their automorphisms into standard triples."""

from .automorphisms import (
    AutomorphismOracle,
    CentralHomDescriptor,
    RingMapDescriptor,
    StandardTriple,
    apply_homothety,
    apply_inner,
    apply_ringmap,
    obfuscated_oracle,
    oracle_from_triple,
    random_parts,
)
from .decompose import DecomposeConfig, DecompositionReport, decompose
from .matrices import Matrix, MonomialMatrix, Permutation, monomial_recognize
from .rings import Dyadic, RatFun, Rational, RingId, Skew
from .words import Diag, Elem, GeneratorWord, Perm, random_word

__version__ = "0.1.0"

__all__ = [
    "AutomorphismOracle", "CentralHomDescriptor", "RingMapDescriptor", "StandardTriple",
    "apply_homothety", "apply_inner", "apply_ringmap", "obfuscated_oracle", "oracle_from_triple", "random_parts",
    "DecomposeConfig", "DecompositionReport", "decompose",
    "Matrix", "MonomialMatrix", "Permutation", "monomial_recognize",
    "Dyadic", "RatFun", "Rational", "RingId", "Skew",
    "Diag", "Elem", "GeneratorWord", "Perm", "random_word",
]
