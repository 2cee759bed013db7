"""Typed logical forms from Universal Dependencies trees of child-directed speech."""
from .lam import alpha_equivalent, beta_reduce, parse_lf, to_text, type_of
from .transducer import (ConversionOutcome, Converter, convert, convert_corpus,
                         default_converter)
from .treebank import DepTree, Session, Token, parse_conllu, read_conllu, validate_tree

__version__ = "0.1.0"

__all__ = [
    "ConversionOutcome", "Converter", "DepTree", "Session", "Token", "alpha_equivalent",
    "beta_reduce", "convert", "convert_corpus", "default_converter", "parse_conllu",
    "parse_lf", "read_conllu", "to_text", "type_of", "validate_tree",
]
