import sys
import logging

logger = logging.getLogger("c2f-motion")
logger.addHandler(logging.NullHandler())

def enable_logging(level=logging.INFO):
    """
    Enable logging for the c2f-motion library.

    Args:
        level: The logging level (default: logging.INFO).

               DEBUG reports every reverse step and optimizer iteration,
               INFO reports stage boundaries only.
    """
    logger.setLevel(level)

    if not any(isinstance(h, logging.StreamHandler) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        formatter = logging.Formatter("%(asctime)s - %(name)s - %(message)s")
        handler.setFormatter(formatter)
        logger.addHandler(handler)
