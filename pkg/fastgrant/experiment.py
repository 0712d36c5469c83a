import asyncio
import logging
from concurrent.futures import Executor, ProcessPoolExecutor
from typing import List, Optional, Union

from tqdm.asyncio import tqdm

from .config import ExperimentConfig
from .engine import ExperimentSetup, prepare_experiment, run_replication
from .models import ExperimentTrace


class ExperimentEnv:
    """
    Environment for running seeded replications of one experiment
    """

    def __init__(
        self,
        config: ExperimentConfig,
        label: str = "default",
        setup: Optional[ExperimentSetup] = None,
    ):
        self.config = config
        self.label = label
        self.setup = setup if setup is not None else prepare_experiment(config)
        self.errors: List[BaseException] = []

    def step(self, replication: int) -> ExperimentTrace:
        """
        Run a single replication
        """
        return run_replication(self.config, self.setup, replication, self.label)

    def step_batch(
        self, replications: int, n_workers: int = 1, pbar: bool = False
    ) -> List[ExperimentTrace]:
        """
        Runs replications 0..replications-1, in parallel processes when n_workers > 1
        """
        return asyncio.run(
            self.astep_batch(replications=replications, n_workers=n_workers, pbar=pbar)
        )

    async def astep_batch(
        self,
        replications: int,
        n_workers: int = 1,
        pbar: Union[tqdm, bool] = False,
    ) -> List[ExperimentTrace]:
        """
        Runs replications through a queue of workers and returns them ordered by index
        """
        results: List[ExperimentTrace] = []
        self.errors = []
        queue: asyncio.Queue[Optional[int]] = asyncio.Queue()
        pbar = (
            tqdm(total=replications, desc=f"Replications of {self.label}")
            if pbar
            else None
        )
        executor = ProcessPoolExecutor(max_workers=n_workers) if n_workers > 1 else None

        try:
            workers = [
                asyncio.create_task(self.worker(queue, results, executor, pbar))
                for _ in range(n_workers)
            ]

            for replication in range(replications):
                await queue.put(replication)

            await queue.join()

            for _ in range(n_workers):
                await queue.put(None)

            await asyncio.gather(*workers)
            if self.errors:
                raise self.errors[0]
        finally:
            if executor is not None:
                executor.shutdown()
            if pbar:
                pbar.close()

        return sorted(results, key=lambda trace: trace.replication)

    async def worker(
        self,
        queue: asyncio.Queue[Optional[int]],
        results: List[ExperimentTrace],
        executor: Optional[Executor],
        pbar: Optional[tqdm],
    ) -> None:
        """
        Worker that takes replication indices from the queue and records their traces
        """
        while True:
            replication = await queue.get()
            if replication is None:
                queue.task_done()
                break
            try:
                logging.debug(
                    "====== Running replication %d of '%s' ======", replication, self.label
                )
                if executor is None:
                    trace = self.step(replication)
                else:
                    loop = asyncio.get_running_loop()
                    trace = await loop.run_in_executor(
                        executor, run_replication, self.config, self.setup, replication, self.label
                    )
                results.append(trace)
            except Exception as e:
                logging.error("Replication %d of '%s' failed: %s", replication, self.label, e)
                self.errors.append(e)
            finally:
                queue.task_done()
            if pbar:
                pbar.update(1)
