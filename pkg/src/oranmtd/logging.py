import logging

_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def set_verbosity(level=logging.INFO):
    """Configure the ``oranmtd`` logger hierarchy once.

    Parameters
    ----------
    level : int or str, optional
        Threshold for the package loggers (the default is ``logging.INFO``).
    """
    logger = logging.getLogger('oranmtd')
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(_FORMAT))
        logger.addHandler(handler)
    logger.setLevel(level)
    return logger
