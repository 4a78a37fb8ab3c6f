"""
Manager class for the worker threads.
"""

from atexit import register
from threading import Lock
from typing import List, Sequence

from qfibound.threading import LOGGER
from qfibound.threading.watcher import ProgressWatcher
from qfibound.threading.worker_thread import Worker


class WorkerManager:
    """
    Manager class for the worker threads.
    """

    _instance = None
    _instance_lock = Lock()
    _initialized = False

    def __new__(cls, debug: bool = False):
        if cls._instance is None:
            with cls._instance_lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self, debug: bool = False):
        if not self._initialized:
            self.__lock = Lock()
            self.__workers: List[Worker] = []
            register(self.stop_all_workers)
            Worker.set_manager(self)
            self.debug = debug
            self._initialized = True

    def __len__(self):
        with self.__lock:
            return len(self.__workers)

    def add_worker(self, worker: Worker):
        """Adds a Worker to the manager.
        """
        with self.__lock:
            if worker in self.__workers:
                raise ValueError("Worker already added")
            self.__workers.append(worker)

    def stop_all_workers(self):
        """
        Stops all workers.
        """
        with self.__lock:
            workers = list(self.__workers)
        for worker in workers:
            if not worker.is_stopped():
                worker.stop()

        LOGGER.debug("All workers stopped")

    def is_stopped(self):
        """Returns whether all workers are stopped.

        Returns:
            bool: True if all workers are stopped, False otherwise.
        """
        with self.__lock:
            return all(worker.is_stopped() for worker in self.__workers)

    def remove_worker(self, worker: Worker):
        """
        Removes a worker from the manager.

        Args:
            worker (Worker): Worker to delete.
        """
        with self.__lock:
            if worker in self.__workers:
                if not worker.is_stopped():
                    worker.stop()
                self.__workers.remove(worker)

    def run_all(self, workers: Sequence[Worker], max_workers: int = 1) -> Sequence[Worker]:
        """
        Runs workers with at most `max_workers` alive at once and waits for all of them.

        Args:
            workers (Sequence[Worker]): Workers that have not been started.
            max_workers (int, optional): Concurrency limit. Defaults to 1.

        Returns:
            Sequence[Worker]: The same workers, in submission order, all finished.
        """
        if max_workers < 1:
            raise ValueError(f"max_workers must be at least 1, got {max_workers}")
        watcher = ProgressWatcher(self, workers) if self.debug else None
        if watcher is not None:
            watcher.start()
        for start in range(0, len(workers), max_workers):
            chunk = workers[start:start + max_workers]
            for worker in chunk:
                worker.start()
            for worker in chunk:
                worker.join()
            LOGGER.debug("%s of %s workers finished", min(start + max_workers, len(workers)), len(workers))
        if watcher is not None:
            watcher.stop()
            watcher.join()
        return workers
