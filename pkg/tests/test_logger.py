import logging

from utils.logger import configure_logging


def _ours(root):
    return [h for h in root.handlers if getattr(h, "_srm_handler", False)]


def test_single_handler_and_levels():
    root = logging.getLogger()
    saved_level = root.level
    try:
        configure_logging("WARNING")
        configure_logging("ERROR")
        assert len(_ours(root)) == 1
        assert root.level == logging.ERROR
        configure_logging("WARNING", verbose=True)
        assert root.level == logging.INFO
        configure_logging("DEBUG", verbose=True)
        assert root.level == logging.DEBUG
    finally:
        for handler in _ours(root):
            root.removeHandler(handler)
        root.setLevel(saved_level)
