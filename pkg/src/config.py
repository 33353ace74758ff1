"""
Configuration settings for the DTBAS simulator.
"""

import os
import streamlit as st
from dotenv import load_dotenv

def get_config_value(key: str, default: str = None):
    """Get configuration value from Streamlit secrets or environment variables."""
    try:
        # Streamlit secrets take priority when a secrets.toml is present
        if hasattr(st, 'secrets') and st.secrets is not None:
            if key in st.secrets:
                return st.secrets[key]
    except Exception:
        # No secrets file outside `streamlit run`
        pass
    load_dotenv()
    return os.getenv(key, default)

class Config:
    """Configuration class for the simulator, the CLI and the dashboard."""

    # Simulation defaults
    SEED = int(get_config_value("DTBAS_SEED", "20240101"))
    N_METERS = int(get_config_value("DTBAS_N_METERS", "10"))
    M_AGGREGATORS = int(get_config_value("DTBAS_M_AGGREGATORS", "3"))
    SCHEME = get_config_value("DTBAS_SCHEME", "additive-random")
    MODULUS = int(get_config_value("DTBAS_MODULUS", str(2**61 - 1)))
    INTERVALS_PER_PERIOD = int(get_config_value("DTBAS_INTERVALS_PER_PERIOD", "2880"))

    # Distinguishing game
    ROUND_LENGTH = int(get_config_value("DTBAS_ROUND_LENGTH", "96"))
    GAME_TRIALS = int(get_config_value("DTBAS_GAME_TRIALS", "5000"))
    GAME_WORKERS = int(get_config_value("DTBAS_GAME_WORKERS", "1"))

    # Passive attacker annotation: hours needed to break the transport cipher
    DECRYPTION_DELAY_HOURS = float(get_config_value("DTBAS_DECRYPTION_DELAY_HOURS", "720"))

    # Logging
    LOG_LEVEL = get_config_value("DTBAS_LOG_LEVEL", "INFO").upper()

    # UI Configuration
    APP_TITLE = "DTBAS Simulator"
    APP_ICON = "🔌"
    UI_INTERVALS_DEFAULT = int(get_config_value("DTBAS_UI_INTERVALS", "96"))
    UI_GAME_TRIALS_DEFAULT = int(get_config_value("DTBAS_UI_GAME_TRIALS", "500"))

    @classmethod
    def validate_config(cls):
        """Validate configuration settings."""
        if cls.SCHEME not in ("naive-equal-split", "additive-random"):
            raise ValueError(f"❌ DTBAS_SCHEME must be 'naive-equal-split' or 'additive-random', "
                             f"got '{cls.SCHEME}'")

        if cls.N_METERS <= 2:
            raise ValueError(f"❌ DTBAS_N_METERS must be greater than 2 (the anonymity set needs "
                             f"more than two users), got {cls.N_METERS}")

        if cls.M_AGGREGATORS <= 2:
            raise ValueError(f"❌ DTBAS_M_AGGREGATORS must be greater than 2, got {cls.M_AGGREGATORS}")

        if not 0 <= cls.SEED < 2**64:
            raise ValueError(f"❌ DTBAS_SEED must fit in 64 bits, got {cls.SEED}")

        for key, value in (("DTBAS_INTERVALS_PER_PERIOD", cls.INTERVALS_PER_PERIOD),
                           ("DTBAS_ROUND_LENGTH", cls.ROUND_LENGTH),
                           ("DTBAS_GAME_TRIALS", cls.GAME_TRIALS),
                           ("DTBAS_GAME_WORKERS", cls.GAME_WORKERS)):
            if value < 1:
                raise ValueError(f"❌ {key} must be at least 1, got {value}")

        if cls.DECRYPTION_DELAY_HOURS < 0:
            raise ValueError("❌ DTBAS_DECRYPTION_DELAY_HOURS cannot be negative")

        return True
