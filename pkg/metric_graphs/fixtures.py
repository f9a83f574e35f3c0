# metric_graphs/fixtures.py
import json
from pathlib import Path
from typing import Dict, Optional

from . import settings
from .exceptions import InputParseError
from .metrics import FiniteMetricSpace, Norm, ToleranceConfig
from .serializers import read_space

FIXTURE_INDEX: Optional[Dict[str, Dict[str, str]]] = None


def load_fixture_index() -> Dict[str, Dict[str, str]]:
    """name -> {"file": ..., "format": ...} from metadata/fixtures.json (empty when absent)."""
    global FIXTURE_INDEX
    if FIXTURE_INDEX is None:
        p = Path(settings.METADATA_DIR) / "fixtures.json"
        if p.exists():
            FIXTURE_INDEX = json.loads(p.read_text(encoding="utf8"))
        else:
            FIXTURE_INDEX = {}
    return FIXTURE_INDEX


def fixture_path(name: str) -> Path:
    entry = load_fixture_index().get(name)
    if entry is None:
        raise InputParseError(f"unknown fixture {name!r}; known: {sorted(load_fixture_index())}")
    return Path(settings.METADATA_DIR) / entry["file"]


def load_fixture(
    name: str,
    norm: Norm = Norm.L2,
    tolerance: Optional[ToleranceConfig] = None,
) -> FiniteMetricSpace:
    entry = load_fixture_index().get(name) or {}
    return read_space(fixture_path(name), entry.get("format", "points-csv"), norm, tolerance)
