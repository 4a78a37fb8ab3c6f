"""
Worker that periodically logs how far a batch of workers has progressed
"""

from typing import Sequence

from qfibound.threading import LOGGER
from qfibound.threading.worker_thread import Worker


class ProgressWatcher(Worker):
    """
    Logs finished and running worker counts of one batch until stopped.
    """

    def __init__(self, manager, workers: Sequence[Worker], interval: float = 3.0):
        super().__init__(name="ProgressWatcher")
        self.manager = manager
        self.workers = workers
        self.interval = interval

    def finished(self) -> int:
        return sum(1 for worker in self.workers if worker.is_stopped() and not worker.is_alive())

    def work(self):
        while True:
            LOGGER.debug("%s of %s workers finished, %s running", self.finished(), len(self.workers), len(self.manager) - 1)
            if self.wait(self.interval):
                break
