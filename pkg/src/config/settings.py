from __future__ import annotations

import configparser
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

DEFAULT_INI = Path(__file__).with_name("app.ini")


@dataclass(frozen=True)
class Settings:
    app_name: str = "decentral_apm"
    environment: str = "development"

    beta0: float = 100.0
    sc_inner_divisor: float = 3.0
    nsc_inner_divisor: float = 5.0
    apm_eta_scale: float = 5000.0
    apm_beta0_scale: float = 0.01
    apm_ls_beta0: float = 0.02
    metric_every: int = 1
    reference_iters: int = 1_000_000
    out_dir: str = "traces"

    log_level: str = "INFO"
    prometheus_push_url: str = ""


# field -> (ini section, ini key, env var, cast)
_KEYS = {
    "app_name": ("app", "name", "APM_APP_NAME", str),
    "environment": ("app", "environment", "APM_ENVIRONMENT", str),
    "beta0": ("experiment", "beta0", "APM_BETA0", float),
    "sc_inner_divisor": ("experiment", "sc_inner_divisor", "APM_SC_INNER_DIVISOR", float),
    "nsc_inner_divisor": ("experiment", "nsc_inner_divisor", "APM_NSC_INNER_DIVISOR", float),
    "apm_eta_scale": ("experiment", "apm_eta_scale", "APM_ETA_SCALE", float),
    "apm_beta0_scale": ("experiment", "apm_beta0_scale", "APM_BETA0_SCALE", float),
    "apm_ls_beta0": ("experiment", "apm_ls_beta0", "APM_LS_BETA0", float),
    "metric_every": ("experiment", "metric_every", "APM_METRIC_EVERY", int),
    "reference_iters": ("experiment", "reference_iters", "APM_REFERENCE_ITERS", int),
    "out_dir": ("experiment", "out_dir", "APM_OUT_DIR", str),
    "log_level": ("logging", "level", "APM_LOG_LEVEL", str),
}


def load_settings(path: Optional[str] = None) -> Settings:
    """
    Defaults from app.ini, then APM_* environment variables (a .env file is
    honoured) override single keys.
    """
    load_dotenv()

    parser = configparser.ConfigParser()
    ini_path = Path(path) if path else DEFAULT_INI
    if ini_path.exists():
        parser.read(ini_path, encoding="utf-8")
    else:
        logger.warning("Settings file %s not found, using built-in defaults", ini_path)

    values: dict[str, object] = {}
    for field_name, (section, key, env_var, cast) in _KEYS.items():
        raw = os.getenv(env_var)
        if raw is None and parser.has_option(section, key):
            raw = parser.get(section, key)
        if raw is None:
            continue
        try:
            values[field_name] = cast(raw.strip())
        except ValueError:
            logger.warning("Ignoring invalid value %r for %s", raw, env_var)

    values["prometheus_push_url"] = os.getenv("PROMETHEUS_PUSH_URL", "").strip()
    return Settings(**values)
