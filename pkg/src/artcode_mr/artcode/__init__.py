"""Artcode marker model: codes, rendering, connected components, decoding."""

from .code import ArtcodeCode, RegionAdjacencyTree
from .dataset import DatasetEntry, generate_dataset, load_manifest
from .labeling import ComponentLabeling, candidate_trees, decode, decode_tree, label_components
from .render import GenSpec, Style, render

__all__ = [
    "ArtcodeCode",
    "ComponentLabeling",
    "DatasetEntry",
    "GenSpec",
    "RegionAdjacencyTree",
    "Style",
    "candidate_trees",
    "decode",
    "decode_tree",
    "generate_dataset",
    "label_components",
    "load_manifest",
    "render",
]
