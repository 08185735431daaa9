import logging
import sys
from pathlib import Path

FORMAT = "%(asctime)s.%(msecs)03d |- %(levelname)-5s |- %(name)s:%(lineno)d |- %(message)s"
DATEFMT = "%m-%d %H:%M:%S"


def setup_logging(verbose: int = 2, log_file: str | None = None) -> logging.Logger:
    """
    Configure the ``clusterkit`` logger for the command line.

    :param verbose: 0 = silent, 1 = WARNING, 2 = INFO (default), 3 = DEBUG.
    :param log_file: File name under ``logs/`` that records everything at DEBUG.
    :return: The configured logger.
    """
    logger = logging.getLogger("clusterkit")
    logger.setLevel(logging.DEBUG)
    logger.propagate = False
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    formatter = logging.Formatter(fmt=FORMAT, datefmt=DATEFMT)

    if verbose > 0:
        match verbose:
            case 1:
                sh_level = logging.WARNING
            case 2:
                sh_level = logging.INFO
            case 3:
                sh_level = logging.DEBUG
            case _:
                sh_level = logging.INFO

        # stdout carries command output only
        sh = logging.StreamHandler(stream=sys.stderr)
        sh.setLevel(level=sh_level)
        sh.setFormatter(formatter)
        logger.addHandler(sh)

    if log_file is not None:
        log_dir = Path("logs")
        log_dir.mkdir(parents=True, exist_ok=True)
        fh = logging.FileHandler(filename=log_dir / log_file, mode="w")
        fh.setLevel(level=logging.DEBUG)
        fh.setFormatter(formatter)
        logger.addHandler(fh)

    if not logger.handlers:
        logger.addHandler(logging.NullHandler())
    logger.debug("Start logging")
    return logger
