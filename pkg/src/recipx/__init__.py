"""Reciprocal recommendation and explanation engine for two-sided matching platforms."""

from recipx.model import (
    AttributeSchema,
    AttributeSpec,
    AttributeValue,
    DatasetError,
    DatasetSnapshot,
    InteractionLog,
    PreferenceModel,
    SynthConfig,
    UserProfile,
    derive_preferences,
    discretize,
    generate_population,
    load_dataset,
    store_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "AttributeSchema",
    "AttributeSpec",
    "AttributeValue",
    "DatasetError",
    "DatasetSnapshot",
    "InteractionLog",
    "PreferenceModel",
    "SynthConfig",
    "UserProfile",
    "derive_preferences",
    "discretize",
    "generate_population",
    "load_dataset",
    "store_dataset",
]
