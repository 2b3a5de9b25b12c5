"""
Helper functions and logging.
"""
import warnings
import logging
import traceback
import numpy as np

logger = logging.getLogger("jmnet")
logger.level = logging.INFO
handler = logging.StreamHandler()
formatter = logging.Formatter("%(levelname)s:%(name)s: %(message)s")
handler.setFormatter(formatter)
logger.addHandler(handler)


def warn(msg):
    warnings.warn(message=msg, stacklevel=3)


def info(msg):
    logger.info(msg=msg)


def debug(msg):
    logger.debug(msg=msg)


def error(e: Exception):
    try:
        err = "".join(traceback.format_exception(e))
    except TypeError:
        err = str(e)
    logger.debug(msg=err)
    logger.error(msg=str(e))


def parse_floats(text):
    """Parses a comma separated list such as ``"1,0.5,1"``."""
    return [float(value) for value in str(text).split(",") if value.strip()]


def to_builtin(obj):
    """Converts numpy scalars and arrays inside nested containers to plain Python objects."""
    if isinstance(obj, dict):
        return {str(key): to_builtin(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_builtin(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return to_builtin(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def show_debug(bool=True):
    if bool:
        logger.setLevel(logging.DEBUG)
    else:
        logger.setLevel(logging.INFO)
