import sys
import time

import numpy as np

from oranmtd.env import make_topology
from oranmtd.harness import exact_admission_oracle, first_fit_admissions, random_trace
from oranmtd.numerics import RandomStream


def _bench(topology, num_traces, max_requests, seed):
    stream = RandomStream(seed)
    traces = [random_trace(topology, stream, max_requests=max_requests) for _ in range(num_traces)]

    start = time.time()
    exact = [exact_admission_oracle(topology, t, horizon=6) for t in traces]
    elapsed_exact = time.time() - start
    start = time.time()
    greedy = [first_fit_admissions(topology, t, horizon=6) for t in traces]
    elapsed_greedy = time.time() - start

    ratio = np.array([g.admitted / max(e.admitted, 1) for g, e in zip(greedy, exact)])
    print('exact oracle:          ', 'elapsed:{0:.4f} mean admitted:{1:.3f}'.format(
        elapsed_exact, np.mean([e.admitted for e in exact])))
    print('first-fit-decreasing:  ', 'elapsed:{0:.4f} mean ratio:{1:.4f} >=0.9 on {2:.1%}'.format(
        elapsed_greedy, ratio.mean(), np.mean(ratio >= 0.9)))


if __name__ == '__main__':
    capacity = int(sys.argv[1]) if len(sys.argv) > 1 else 30
    max_requests = int(sys.argv[2]) if len(sys.argv) > 2 else 8
    _bench(make_topology([(6, 4), (3, 2)], [capacity, capacity]), 100, max_requests, seed=0)
