#!/usr/bin/env python

import time
from tabulate import tabulate


class DebugTimer():
    '''
    Measure run times of the phases of a computation and summarize results
    '''
    def __init__(self, initial_message=None, precision=3):
        self.precision = precision
        self.clear(initial_message=initial_message)

    def clear(self, initial_message=None):
        self.data = []
        if initial_message is None:
            initial_message = 'start'
        self.add(initial_message)

    def add(self, msg):
        self.data.append((msg, time.perf_counter()))

    @property
    def total(self):
        return self.data[-1][1] - self.data[0][1]

    def get_table(self, precision=None, tablefmt='simple_outline'):
        prec = self.precision if precision is None else precision
        m0, t0 = self.data[0]
        tprev = t0
        header = ['Phase', 'Delta Time', 'Total Time']
        table = [[m0, 0, 0]]
        for m, t in self.data[1:]:
            table.append([m, t-tprev, t-t0])
            tprev = t
        return tabulate(table, header, floatfmt=f'.{prec}f', tablefmt=tablefmt)

    def show(self, precision=None, tablefmt='outline', file=None):
        print(self.get_table(precision=precision, tablefmt=tablefmt), file=file)


def debugtimer(initial_message=None, precision=3):
    '''debugtimer returns a DebugTimer object to time the phases of a
    command, and then write a simple report of the results.

    Arguments
    ------------
    initial_message: str, optional first row label ['start']
    precision:       int, precision for timing results [3]

    Example:
    -------
      timer = debugtimer('parse', precision=4)
      params = catalog('general-ldp', eps0=1.0, n=10000)
      timer.add('params')
      upper_bound(BoundRequest(params, 1.e-6))
      timer.add('search')
      timer.show(tablefmt='outline')
    '''
    return DebugTimer(initial_message=initial_message, precision=precision)
