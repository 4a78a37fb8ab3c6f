import logging
import sys

logging.basicConfig(stream=sys.stdout, level=logging.INFO,
    format="[%(asctime)s] %(levelname)s [%(name)s.%(funcName)s:%(lineno)d] %(message)s",
    datefmt="%d/%m/%Y %H:%M:%S")
LOGGER = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-9
PROB_FLOOR = 1e-12
SLD_FLOOR = 1e-10
DET_FLOOR = 1e-12
PSD_TOL = 1e-10


def set_verbose(verbose: bool):
    """
    Switches the root logger between INFO and DEBUG.

    Args:
        verbose (bool): True to log at DEBUG level.
    """
    logging.getLogger().setLevel(logging.DEBUG if verbose else logging.INFO)
