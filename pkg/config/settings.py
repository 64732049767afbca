"""
Runtime settings for the kernel, the CLI and the API
Values come from the environment (optionally a .env file); none are required.
"""

import os
from dataclasses import dataclass
from functools import lru_cache

from dotenv import load_dotenv

load_dotenv()

DEFAULT_ENUMERATION_CAP = 2 ** 16
DEFAULT_MAX_DIM = 32


@dataclass(frozen=True)
class KernelSettings:
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    max_dim: int = DEFAULT_MAX_DIM
    output_dir: str = 'downloads'
    log_level: str = 'WARNING'
    secret_key: str = 'dev-key-change-in-production'


def _int_from_env(name, default):
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")
    if value < 1:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


@lru_cache(maxsize=1)
def get_settings():
    """Build settings from the environment once per process"""
    return KernelSettings(
        enumeration_cap=_int_from_env('LEIBNIZ_ENUMERATION_CAP', DEFAULT_ENUMERATION_CAP),
        max_dim=_int_from_env('LEIBNIZ_MAX_DIM', DEFAULT_MAX_DIM),
        output_dir=os.getenv('LEIBNIZ_OUTPUT_DIR', 'downloads'),
        log_level=os.getenv('LEIBNIZ_LOG_LEVEL', 'WARNING').upper(),
        secret_key=os.getenv('SECRET_KEY', 'dev-key-change-in-production'),
    )


def reload_settings():
    get_settings.cache_clear()
    return get_settings()
