"""Shipped block matrices for the known extremal structures."""

from __future__ import annotations

from importlib import resources

from ..clump import ClumpMatrix, parse_matrix

BLOCK_NAMES = [
    "delta4",
    "delta5",
    "delta6",
    "delta7",
    "delta8_t1",
    "delta8_t2",
    "delta8_t3",
    "delta16",
]

BLOCK_DELTA = {
    "delta4": 4,
    "delta5": 5,
    "delta6": 6,
    "delta7": 7,
    "delta8_t1": 8,
    "delta8_t2": 8,
    "delta8_t3": 8,
    "delta16": 16,
}


def fixture_text(filename: str) -> str:
    return resources.files(__package__).joinpath(filename).read_text()


def load_block(name: str) -> ClumpMatrix:
    return parse_matrix(fixture_text(f"{name}.block"))


def load_repeatable(name: str) -> ClumpMatrix:
    return parse_matrix(fixture_text(f"{name}.repeatable"))


def fixture_path(filename: str) -> str:
    with resources.as_file(resources.files(__package__).joinpath(filename)) as p:
        return str(p)
