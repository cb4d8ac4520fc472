"""Python bindings for the microforge core."""

import os
from pathlib import Path

from ._microforge import *  # noqa: F401,F403
from ._microforge import Error, ContractViolation  # noqa: F401

_here = Path(__file__).resolve().parent
if (_here / "templates").is_dir():
    os.environ.setdefault("MICROFORGE_TEMPLATES", str(_here / "templates"))


def template_dir() -> Path:
    env = os.environ.get("MICROFORGE_TEMPLATES")
    return Path(env) if env else _here / "templates"


def data_dir() -> Path:
    env = os.environ.get("MICROFORGE_DATA")
    return Path(env) if env else _here / "data"
