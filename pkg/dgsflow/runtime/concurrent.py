"""One execution unit per worker, connected by FIFO queues; the router feeds input in O order."""
import logging
import multiprocessing
import queue
import threading
import time

from dgsflow.errors import Deadlock, DgsError, error_from_dict
from dgsflow.runtime.routing import Router
from dgsflow.runtime.worker import ROUTER, EndOfInput, RoutedEvent, RoutedHeartbeat
from dgsflow.streams import is_heartbeat, merge_messages

logger = logging.getLogger(__name__)


def _worker_loop(worker, inbox, inboxes, results, idle_timeout):
    def dispatch(outgoing):
        for dst, msg in outgoing:
            inboxes[dst].put((worker.id, msg))

    try:
        while not worker.complete:
            try:
                sender, msg = inbox.get(timeout=idle_timeout)
            except queue.Empty:
                results.put(('deadlock', worker.id, worker.describe()))
                return
            dispatch(worker.receive(sender, msg))
            while worker.can_step:
                dispatch(worker.step())
        results.put(('done', worker.id, worker.finish()))
    except DgsError as e:
        results.put(('error', worker.id, e.to_dict()))
    except Exception as e:
        results.put(('error', worker.id, {'success': False, 'error': str(e), 'error_type': type(e).__name__,
                                           'worker': worker.id}))


def _feed(router, streams, inboxes):
    for msg in merge_messages(streams):
        ingest = time.monotonic()
        for target, out in router.deliveries(msg):
            wrapped = RoutedHeartbeat(out) if is_heartbeat(out) else RoutedEvent(out, ingest)
            inboxes[target].put((ROUTER, wrapped))
    for inbox in inboxes.values():
        inbox.put((ROUTER, EndOfInput()))


def _collect(results, count, idle_timeout):
    finished, stuck, errors = {}, [], []
    while len(finished) + len(stuck) + len(errors) < count:
        try:
            kind, worker_id, payload = results.get(timeout=idle_timeout * 2)
        except queue.Empty:
            raise Deadlock('workers stopped reporting', finished=sorted(finished))
        if kind == 'done':
            finished[worker_id] = payload
        elif kind == 'deadlock':
            stuck.append(payload)
        else:
            errors.append(payload)
    if errors:
        for other in errors[1:]:
            logger.error('worker failure: %s', other)
        raise error_from_dict(errors[0])
    if stuck:
        raise Deadlock(f'{len(stuck)} worker(s) idle past the timeout', workers=stuck)
    return finished


def run_threads(workers, plan, streams, idle_timeout=30.0):
    inboxes = {wid: queue.Queue() for wid in workers}
    results = queue.Queue()
    threads = [
        threading.Thread(target=_worker_loop, args=(w, inboxes[wid], inboxes, results, idle_timeout),
                         name=f'dgs-{wid}', daemon=True)
        for wid, w in workers.items()
    ]
    for thread in threads:
        thread.start()
    _feed(Router(plan), streams, inboxes)
    finished = _collect(results, len(workers), idle_timeout)
    for thread in threads:
        thread.join(timeout=idle_timeout)
    return [finished[wid] for wid in workers]


def run_processes(workers, plan, streams, idle_timeout=30.0):
    ctx = multiprocessing.get_context('fork')
    inboxes = {wid: ctx.Queue() for wid in workers}
    results = ctx.Queue()
    processes = [
        ctx.Process(target=_worker_loop, args=(w, inboxes[wid], inboxes, results, idle_timeout),
                    name=f'dgs-{wid}', daemon=True)
        for wid, w in workers.items()
    ]
    for process in processes:
        process.start()
    try:
        _feed(Router(plan), streams, inboxes)
        finished = _collect(results, len(workers), idle_timeout)
    finally:
        for process in processes:
            process.join(timeout=1.0)
            if process.is_alive():
                process.terminate()
    return [finished[wid] for wid in workers]


BACKENDS = {'thread': run_threads, 'process': run_processes}
