import logging
import os
import pickle
import shutil
import tempfile
import uuid

import luigi
import luigi.format

from .errors import InconsistencyError
from .utils import get_resource_path

LOGGING_CONF = 'luigi_logging.cfg'


def job_to_task(index, job, work_dir, run_id):
    """Wraps one job in a luigi Task that pickles its result to work_dir"""
    logger = logging.getLogger('luigi-interface')
    func, args = job
    target = luigi.LocalTarget(
        os.path.join(work_dir, 'job_{}.pkl'.format(index)),
        format=luigi.format.Nop)

    def output(self):
        return target

    def run(self):
        logger.debug('running patchr0 job %d', index)
        result = func(*args)
        with self.output().open('w') as fout:
            pickle.dump(result, fout)

    task = type(
        'Job_{}_{}'.format(run_id, index),
        (luigi.Task,),
        {'output': output,
         'run': run})()
    return task


def run(jobs, workers=1, logging_conf_file=None):
    """Runs independent jobs on a local luigi scheduler.

    Parameters
    ----------
    jobs : list of (callable, tuple)
        Each job is called as ``func(*args)`` in a worker
    workers : int
        Number of luigi worker processes
    logging_conf_file : str or None
        logging.config file for luigi; the shipped one when None

    Returns
    -------
    list
        The job results, in job order

    Raises
    ------
    InconsistencyError
        if a job did not produce its result

    """
    if logging_conf_file is None:
        logging_conf_file = get_resource_path(LOGGING_CONF)
    work_dir = tempfile.mkdtemp(prefix='patchr0_')
    run_id = uuid.uuid4().hex[:8]
    try:
        tasks = [job_to_task(index, job, work_dir, run_id)
                 for index, job in enumerate(jobs)]
        luigi.build(tasks, workers=max(int(workers), 1),
                    local_scheduler=True,
                    logging_conf_file=logging_conf_file)
        results = []
        for index, task in enumerate(tasks):
            target = task.output()
            if not target.exists():
                raise InconsistencyError(
                    'luigi job {} produced no result'.format(index))
            with target.open('r') as fin:
                results.append(pickle.load(fin))
        return results
    finally:
        shutil.rmtree(work_dir, ignore_errors=True)
