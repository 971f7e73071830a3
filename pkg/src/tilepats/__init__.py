"""Patterned self-assembly: SAT -> PATS -> 3-color MBPATS reductions, witnesses and exact oracles."""
from tilepats.core import (
    Assignment,
    AssemblyError,
    Census,
    ColorMismatch,
    DensePattern,
    NoTileFits,
    NotDirected,
    Pattern,
    ProceduralPattern,
    Seed,
    TileError,
    TileSet,
    TileType,
    VerifyError,
    assemble,
    color_census,
    glue_isomorphic,
    is_directed,
    pattern_of,
    verify_stream,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "AssemblyError",
    "Census",
    "ColorMismatch",
    "DensePattern",
    "NoTileFits",
    "NotDirected",
    "Pattern",
    "ProceduralPattern",
    "Seed",
    "TileError",
    "TileSet",
    "TileType",
    "VerifyError",
    "assemble",
    "color_census",
    "glue_isomorphic",
    "is_directed",
    "pattern_of",
    "verify_stream",
]
