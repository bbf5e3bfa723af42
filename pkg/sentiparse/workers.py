"""
This module provides a subclass of thread, SentenceWorker, which adds
logging and the ability to cancel the thread, and :func:`map_sentences`
which spreads a per-sentence function over a pool of them.

Results always come back in input order, so the output of a command
does not depend on the number of workers.
"""
import queue
from threading import Thread

from . import utils

# Sentinel telling a worker there are no more jobs
_STOP = None


class SentenceWorker(Thread):
    """
    Thread applying a function to ``(index, item)`` jobs taken from an
    input queue, putting ``(index, result, error)`` on an output queue.
    """

    def __init__(self, func, jobs, results, handlers, name=None):
        """
        Constructor

        :param func:
            Function called with one item

        :param jobs:
            Queue of ``(index, item)`` pairs, ended by ``None``

        :param results:
            Queue receiving ``(index, result, error)``

        :param handlers:
            List of log handlers to use
        """
        super(SentenceWorker, self).__init__(name=name)
        self.daemon = True
        self.cancelled = False

        self._func = func
        self._jobs = jobs
        self._results = results

        self._logger = None
        self.start_logger(handlers)

    def start_logger(self, handlers):
        """
        Start a logger with the name of the instance type

        :param handlers:
            Log handlers to add
        """
        self._logger = utils.start_logger(
            'sentiparse.' + type(self).__name__, handlers)

    def run(self):
        while not self.cancelled:
            job = self._jobs.get()
            if job is _STOP:
                break
            index, item = job
            try:
                result = self._func(item)
            except Exception as e:
                utils.log_exception(self._logger, e)
                self._results.put((index, None, e))
            else:
                self._results.put((index, result, None))

    #####################################
    # Methods for call from parent thread
    #####################################

    def cancel(self):
        """
        Cancel the thread, and log its stopping to the logger.

        :return: :const:`None`
        """
        self.cancelled = True
        self._logger.debug("Stopping " + str(self) + "...")


def map_sentences(func, items, jobs=1, handlers=()):
    """
    Apply ``func`` to every item, on ``jobs`` worker threads.

    :param func: Function of one item.
    :param items: Iterable of items (usually sentences or graphs).
    :param jobs: Number of workers; 1 or less runs in the calling thread.
    :param handlers: Log handlers for the workers.

    :return: List of results in input order.

    :exception Exception:
        The exception of the first failing item (in input order) is
        re-raised once all workers have stopped.
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    job_queue = queue.Queue()
    result_queue = queue.Queue()
    workers = [SentenceWorker(func, job_queue, result_queue, handlers,
                              name='SentenceWorker-%d' % i)
               for i in range(min(jobs, len(items)))]
    for index, item in enumerate(items):
        job_queue.put((index, item))
    for _ in workers:
        job_queue.put(_STOP)
    for w in workers:
        w.start()

    results = [None] * len(items)
    errors = {}
    try:
        for _ in items:
            index, result, error = result_queue.get()
            if error is not None:
                errors[index] = error
            results[index] = result
    finally:
        for w in workers:
            if w.is_alive():
                w.cancel()
        for w in workers:
            w.join()

    if errors:
        raise errors[min(errors)]
    return results
