"""
Custom Thread implementation that can be stopped and keeps the outcome of its work.
"""

import threading

from qfibound.threading import LOGGER


class Worker(threading.Thread):
    """
    A custom Thread implementation that can be stopped.
    """

    __manager = None

    def __init__(self, name: str = None):
        super().__init__(name=name, daemon=True)
        self.__stopped_event = threading.Event()
        self.result = None
        self.error = None

    @classmethod
    def set_manager(cls, manager):
        """
        Sets the WorkerManager instance.

        Args:
            manager (WorkerManager): The WorkerManager instance.
        """
        cls.__manager = manager

    def stop(self):
        """
        Stops the thread.
        """
        self.__stopped_event.set()

    def is_stopped(self):
        """
        Returns whether the thread is stopped.

        Returns:
            bool: True if the thread is stopped, False otherwise.
        """
        return self.__stopped_event.is_set()

    def wait(self, timeout: float) -> bool:
        """
        Sleeps until the thread is stopped or the timeout passes.

        Returns:
            bool: True if the thread was stopped.
        """
        return self.__stopped_event.wait(timeout)

    def run(self) -> None:
        """
        Runs the thread. The return value of `work()` is kept in `result`,
        an exception raised by it in `error`.
        """
        manager = self.__manager
        if manager is not None:
            manager.add_worker(self)
        try:
            self.result = self.work()
        except Exception as error:  # pylint: disable=broad-except
            self.error = error
            LOGGER.error("%s failed: %s", self.name, error, exc_info=True)
        finally:
            if manager is not None:
                manager.remove_worker(self)
            self.stop()

    def work(self):
        """
        Override this method to do work in the thread.

        Use `self.is_stopped()` to check if the thread has been stopped.
        """
        return None
