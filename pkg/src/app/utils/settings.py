import os
from dataclasses import dataclass


@dataclass
class Settings:
    _instance = None

    # application keys
    app_name = os.environ.get("RSP_APP_NAME", "rsp-sim")
    env = os.environ.get("RSP_ENV", "local")
    logging_level = os.environ.get("RSP_LOG_LEVEL", "WARNING")
    app_logging_level = os.environ.get("RSP_APP_LOG_LEVEL", "INFO")

    # simulation defaults
    default_output_dir = os.environ.get("RSP_OUTPUT_DIR", "out")
    default_config_format = os.environ.get("RSP_CONFIG_FORMAT", "ini")

    def __init__(self):
        self.load_from_env()

    def load_from_env(self):
        """Re-read every RSP_* variable; lets tests flip levels without reimporting."""
        self.app_name = os.environ.get("RSP_APP_NAME", "rsp-sim")
        self.env = os.environ.get("RSP_ENV", "local")
        self.logging_level = os.environ.get("RSP_LOG_LEVEL", "WARNING").upper()
        self.app_logging_level = os.environ.get("RSP_APP_LOG_LEVEL", "INFO").upper()
        self.default_output_dir = os.environ.get("RSP_OUTPUT_DIR", "out")
        self.default_config_format = os.environ.get("RSP_CONFIG_FORMAT", "ini").lower()

    def reload(self):
        Settings._instance = None
        self.load_from_env()


SETTINGS = Settings()
