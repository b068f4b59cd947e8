import time
from functools import wraps

from app.utils.logging import logger


def timed(log_label: str):
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            start = time.time()
            try:
                result = func(*args, **kwargs)
                return result
            finally:
                duration = time.time() - start
                msg = f"{log_label} execution time: {duration:.2f} seconds"
                logger.debug({'message': msg})
        return wrapper
    return decorator
