"""
Process-level settings read from the environment (and an optional .env file)
"""

import logging
import os
import sys
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from irconstyle.errors import ConfigError

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class Settings(BaseModel):
    """Environment-driven knobs that are not part of a training config"""

    threads: int = Field(default=1, ge=1)
    log_level: str = "INFO"
    output_dir: str = "runs"

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if not isinstance(logging.getLevelName(value), int):
            raise ValueError(f"unknown log level {value!r}")
        return value

    @classmethod
    def from_env(cls, dotenv_path: Optional[str] = None) -> "Settings":
        """
        Build settings from CONSTYLE_* environment variables

        Args:
            dotenv_path: Explicit .env file; the default search is used when None

        Returns:
            Validated settings
        """
        load_dotenv(dotenv_path)
        try:
            return cls(
                threads=os.getenv("CONSTYLE_THREADS", "1"),
                log_level=os.getenv("CONSTYLE_LOG_LEVEL", "INFO"),
                output_dir=os.getenv("CONSTYLE_OUTPUT_DIR", "runs"),
            )
        except ValidationError as exc:
            field = str(exc.errors()[0]["loc"][0])
            raise ConfigError(exc.errors()[0]["msg"], field=f"CONSTYLE_{field.upper()}") from exc


def configure_logging(level: str = "INFO") -> None:
    """Send all framework logs to stderr so stdout stays machine-readable"""
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root = logging.getLogger("irconstyle")
    root.handlers[:] = [handler]
    root.setLevel(level)
    root.propagate = False
