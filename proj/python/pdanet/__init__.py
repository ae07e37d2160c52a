"""Placement delivery arrays for coded caching."""

from ._pdanet import (
    Graph,
    InvalidParameter,
    InvalidPda,
    Model,
    ParseError,
    Pda,
    PdaError,
    TrainingPair,
    canonicalize,
    color_placement,
    construct_mn,
    format_corpus,
    graph_to_pda,
    greedy_color,
    parse_corpus,
    parse_graph,
    parse_pda,
    pda_to_graph,
    simulate,
    subsample,
    train,
    training_pair,
    verify,
)

__all__ = [
    "Graph",
    "InvalidParameter",
    "InvalidPda",
    "Model",
    "ParseError",
    "Pda",
    "PdaError",
    "TrainingPair",
    "canonicalize",
    "color_placement",
    "construct_mn",
    "format_corpus",
    "graph_to_pda",
    "greedy_color",
    "parse_corpus",
    "parse_graph",
    "parse_pda",
    "pda_to_graph",
    "simulate",
    "subsample",
    "train",
    "training_pair",
    "verify",
]
