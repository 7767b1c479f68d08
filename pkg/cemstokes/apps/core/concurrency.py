from concurrent.futures import ThreadPoolExecutor

from .conf import solver_setting


def ordered_map(function, items, threads=None):
    """ maps `function` over `items` on a thread pool, results in input order

    The numerical kernels release the GIL, so threads overlap the dense
    factorizations. Results never depend on the thread count.
    """
    items = list(items)
    threads = int(threads or solver_setting('THREADS'))

    if threads <= 1 or len(items) <= 1:
        return [function(item) for item in items]

    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(function, items))
