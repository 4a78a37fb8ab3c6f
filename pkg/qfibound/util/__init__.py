import logging

LOGGER = logging.getLogger(__name__)
