#!/usr/bin/env python
"""
Exceptions raised by vrshuffle.

Each exception carries a short `reason` slug and the exit code that the
`vr` command uses when the exception reaches it.
"""

class VRShuffleException(Exception):
    """base exception for vrshuffle"""
    reason = 'error'
    exit_code = 1

    def __init__(self, msg):
        Exception.__init__(self, msg)
        self.msg = msg

    def __str__(self):
        return self.msg

class ParameterError(VRShuffleException, ValueError):
    """argument outside of its domain, unknown mechanism, bad weights"""
    reason = 'parameter-domain'
    exit_code = 2

class UnboundedRatioError(ParameterError):
    """a probability ratio needed for a parameter is infinite"""
    reason = 'unbounded-ratio'

class UnsupportedRegimeError(VRShuffleException):
    """parameters valid, but outside what the requested engine can evaluate"""
    reason = 'unsupported-regime'
    exit_code = 3

class SizeLimitError(UnsupportedRegimeError):
    """enumeration cap exceeded"""
    reason = 'size-limit'

class GridRangeError(VRShuffleException):
    """privacy curve grid does not cover the required range"""
    reason = 'range'
    exit_code = 3

class OutputError(VRShuffleException):
    """file could not be read or written"""
    reason = 'io'
    exit_code = 4
