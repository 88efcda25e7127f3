import logging

logger = logging.getLogger(__name__)


def run(jobs):
    """Runs jobs one after another in the current process.

    This back-end is meant for debugging and small sweeps. For larger
    sweeps use :func:`patchr0.run_luigi.run`.

    Parameters
    ----------
    jobs : list of (callable, tuple)
        Each job is called as ``func(*args)``

    Returns
    -------
    list
        The job results, in job order

    """
    results = []
    for index, (func, args) in enumerate(jobs):
        logger.debug('job %d of %d', index + 1, len(jobs))
        results.append(func(*args))
    return results
