import os


def _optional_int(name):
    value = os.getenv(name)
    return int(value) if value not in (None, "") else None


class Config:
    SECRET_KEY = os.getenv("SECRET_KEY", "dev-secret-key-change-in-production")
    JSON_SORT_KEYS = False

    # Brute-force guards
    ORACLE_MAX_MESSAGES = int(os.getenv("MSIC_ORACLE_MAX_MESSAGES", "8"))
    ORACLE_MAX_LENGTH = _optional_int("MSIC_ORACLE_MAX_LENGTH")  # None means "up to m"
    VERIFY_MAX_MESSAGES = int(os.getenv("MSIC_VERIFY_MAX_MESSAGES", "20"))

    # Search limits
    EXACT_TREE_LIMIT = int(os.getenv("MSIC_EXACT_TREE_LIMIT", "16"))
    EXHAUSTIVE_STATE_BUDGET = int(os.getenv("MSIC_EXHAUSTIVE_STATE_BUDGET", "20000"))

    # Worker processes for the oracle search
    JOBS = int(os.getenv("MSIC_JOBS", "1"))

    LOG_LEVEL = os.getenv("MSIC_LOG_LEVEL", "WARNING")
