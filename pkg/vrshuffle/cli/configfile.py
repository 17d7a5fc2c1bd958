#!/usr/bin/python

from ..utils import ConfigFile, load_yaml, get_default_configfile
from ..divergence import DivergenceOptions

# default vr configuration
_configtext = """
format: text
threads: 1
trunc_delta: 1.0e-18
iters: 20
oracle_max_n: 5000

compose:
  eps_error: 0.01
  delta_error: 1.0e-8
  points: 41

sweep:
  iters: 20
"""

CONFIGFILE = 'vrshuffle.yaml'


class VRConfig(ConfigFile):
    def __init__(self, fname=None, default_config=None):
        if default_config is None:
            default_config = load_yaml(_configtext)
        if fname is None:
            fname = get_default_configfile(CONFIGFILE)
        ConfigFile.__init__(self, fname, default_config=default_config)

    def override(self, **kws):
        """set top-level values from command-line flags that were given"""
        for key, val in kws.items():
            if val is not None:
                self.config[key] = val

    def section(self, name):
        return self.config.get(name, {}) or {}

    def divergence_options(self):
        return DivergenceOptions(trunc_delta=float(self.config['trunc_delta']),
                                 threads=int(self.config['threads']))
