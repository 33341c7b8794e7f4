import logging
import os

level_mapping = {
    'CRITICAL': logging.CRITICAL,
    'ERROR': logging.ERROR,
    'WARNING': logging.WARNING,
    'INFO': logging.INFO,
    'DEBUG': logging.DEBUG,
    'NOTSET': logging.NOTSET
}

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

def setup_logging(level: str = None) -> int:
    """Configure the root logger from ``level`` or the LOG_LEVEL environment variable."""
    name = (level or os.getenv("LOG_LEVEL", 'ERROR')).upper()
    resolved = level_mapping.get(name, logging.ERROR)
    logging.basicConfig(level=resolved, format=LOG_FORMAT)
    return resolved
