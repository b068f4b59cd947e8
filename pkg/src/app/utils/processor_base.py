import sys
import time
from abc import ABC, abstractmethod
from argparse import Namespace

from pydantic import ValidationError

from app.utils.enums import ExitCode
from app.utils.exceptions import ConfigError, RspError
from app.utils.logging import logger


class ProcessorBase(ABC):
    """Base for CLI commands: times the run and maps failures onto stable exit codes."""

    @abstractmethod
    def _process(self, args: Namespace) -> ExitCode:
        pass

    def process(self, args: Namespace) -> int:
        start_time = time.time()
        logger.info(f"{self.__class__.__name__} started processing")
        try:
            result = self._process(args)
        except (ConfigError, ValidationError) as e:
            logger.error(f"Configuration error in {self.__class__.__name__}: {e}")
            result = self._report_error(e, ExitCode.CONFIG_ERROR)
        except RspError as e:
            logger.error(f"Error in {self.__class__.__name__}: {e}", exc_info=True)
            result = self._report_error(e, ExitCode.RUNTIME_ERROR)
        except (OSError, ValueError) as e:
            logger.error(f"Error in {self.__class__.__name__}: {e}", exc_info=True)
            result = self._report_error(e, ExitCode.RUNTIME_ERROR)
        execution_time = time.time() - start_time
        logger.info(f"{self.__class__.__name__} finished processing in {execution_time:.2f} seconds "
                    f"with exit code {int(result)}")
        return int(result)

    def _report_error(self, e: Exception, code: ExitCode) -> ExitCode:
        label = "config error" if code is ExitCode.CONFIG_ERROR else "error"
        print(f"{label}: {e}", file=sys.stderr)
        return code
