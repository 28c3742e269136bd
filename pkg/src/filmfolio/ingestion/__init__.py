"""Parsing and validation of every input format, plus fame-score providers."""

from .common import FORMAT_VERSION, InputError, format_money, parse_money
from .fame import (
    FameProvider,
    FameQuery,
    FameResult,
    FileFameProvider,
    LLMFameProvider,
    resolve_fame_scores,
)
from .instance_io import dump_instance, dumps_instance, load_instance
from .matrix_io import dumps_matrix, dumps_posterior, load_criteria, load_matrix
from .movies import MovieRecord, adjust_for_inflation, load_inflation, load_movies
from .preferences_io import dumps_preferences, load_preferences
