"""
Logging helpers shared by the command-line front-end, the workers and
the training loop.
"""

import logging
import os
import sys

FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def make_handlers(log_file=None, level=logging.INFO):
    """
    Create the log handlers for a run: a stream handler to stderr and,
    when ``log_file`` is given, a file handler that records everything
    from DEBUG up.

    :param log_file:
        Optional path of the log file

    :param level:
        Level of the stderr handler

    :return: List of handlers sharing one formatter.
    """
    handlers = []

    sh = logging.StreamHandler()  # default is sys.stderr
    sh.setLevel(level)
    handlers.append(sh)

    if log_file is not None:
        fh = logging.FileHandler(log_file)
        fh.setLevel(logging.DEBUG)
        handlers.append(fh)

    formatter = logging.Formatter(FORMAT)
    for h in handlers:
        h.setFormatter(formatter)
    return handlers


def start_logger(name, handlers):
    """
    Get the logger called ``name`` and attach ``handlers`` to it.
    A handler already attached to the logger or one of its ancestors is
    skipped, so no record is emitted twice.

    :param name: Logger name
    :param handlers: Log handlers to add
    :return: The logger
    """
    logger = logging.getLogger(name)
    attached = set()
    node = logger
    while node is not None:
        attached.update(node.handlers)
        node = node.parent if node.propagate else None
    for h in handlers:
        if h not in attached:
            logger.addHandler(h)
    logger.setLevel(logging.DEBUG)
    return logger


def stop_logger(name, handlers):
    """Detach ``handlers`` from the logger called ``name``."""
    logger = logging.getLogger(name)
    for h in handlers:
        logger.removeHandler(h)


def log_exception(logger, e):
    """
    Log an exception, with the file and line it was raised at.

    :param logger: The logger to write to
    :param e: The exception which was thrown
    :return:
    """
    tb = sys.exc_info()[-1]
    if tb is not None:
        while tb.tb_next is not None:
            tb = tb.tb_next
        logger.error("%s raised: %s (%s:%d)"
                     % (e.__class__.__name__,
                        str(e),
                        os.path.basename(
                            tb.tb_frame.f_code.co_filename),
                        tb.tb_lineno))
        del tb
    else:
        logger.error("%s raised: %s"
                     % (e.__class__.__name__,
                        str(e)))
