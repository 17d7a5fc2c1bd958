#!/usr/bin/env python
"""
YAML / TOML configuration files for vrshuffle.
"""
import copy
import logging
from os import environ as ENV
from pathlib import Path

import yaml
# toml writes, tomllib (or tomli before Python 3.11) reads
import toml
try:
    import tomllib
except ImportError:
    import tomli as tomllib

from pyshortcuts.utils import get_homedir

from ..errors import OutputError

logger = logging.getLogger(__name__)

CONFIG_ENVVAR = 'VRSHUFFLE_CONFIG'
DEFAULT_CONFIGNAME = 'vrshuffle.yaml'


def load_yaml(text):
    """very simple yaml loader"""
    return yaml.load(text, Loader=yaml.Loader)


def load_toml(text):
    """very simple toml loader"""
    return tomllib.loads(text)


def get_configfolder():
    """
    get the vrshuffle config folder

    Returns:
        path name of config folder, the folder of $VRSHUFFLE_CONFIG if that
        is set, or else $HOME/.config/vrshuffle
    """
    envfile = ENV.get(CONFIG_ENVVAR, None)
    if envfile is not None:
        confdir = Path(envfile).parent
    else:
        confdir = Path(get_homedir(), '.config', 'vrshuffle')
    return confdir.as_posix()


def get_default_configfile(fname=DEFAULT_CONFIGNAME):
    """$VRSHUFFLE_CONFIG, or fname in the config folder, or None if it does not exist"""
    envfile = ENV.get(CONFIG_ENVVAR, None)
    path = Path(envfile) if envfile is not None else Path(get_configfolder(), fname)
    if path.exists():
        return path.as_posix()
    return None


def _merge(base, update):
    "recursive dict update, nested dicts are merged key by key"
    out = copy.deepcopy(base)
    for key, val in update.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


class ConfigFile(object):
    """
    Configuration File, using either YAML or TOML
    The ConfigFile will have attributes / methods:

    config:          dict of configuration data
    default_config:  factory default configuration data
    filename:        name of config file, or None
    reset_default(): set config to factory default
    read(fname):     read config from file, merged over the defaults
    write(fname=None, config=None):  write config to file
    """
    def __init__(self, fname=None, default_config=None):
        self.filename = None
        self.default_config = {}
        if default_config is not None:
            self.default_config.update(default_config)
        self.reset_default()
        if fname is not None:
            self.read(fname)

    def reset_default(self):
        """reset config to initial / factory default"""
        self.config = copy.deepcopy(self.default_config)

    def read(self, fname):
        """read config file

        Arguments:
            fname (str):  name of configuration file

        Notes:
           1. a file that does not exist raises OutputError.
           2. a '.toml' file is read as TOML, anything else as YAML.
        """
        fpath = Path(fname)
        if not fpath.exists():
            raise OutputError(f"config file not found: {fname}")
        try:
            text = fpath.read_text()
        except OSError as exc:
            raise OutputError(f"cannot read config file {fname}: {exc}")

        try:
            if fpath.suffix == '.toml':
                conf = load_toml(text)
            else:
                conf = load_yaml(text)
        except (yaml.YAMLError, tomllib.TOMLDecodeError) as exc:
            raise OutputError(f"cannot parse config file {fname}: {exc}")
        if conf is None:
            conf = {}
        if not isinstance(conf, dict):
            raise OutputError(f"config file {fname} must hold a mapping")
        self.filename = fpath.absolute().as_posix()
        self.config = _merge(self.default_config, conf)
        logger.debug("read config file %s", self.filename)

    def write(self, fname=None, config=None):
        if fname is None:
            fname = self.filename
        if config is None:
            config = self.config
        fpath = Path(fname)
        try:
            with open(fpath, 'w') as fh:
                if fpath.suffix == '.toml':
                    fh.write(toml.dumps(config))
                else:
                    yaml.dump(config, fh, default_flow_style=None)
        except OSError as exc:
            raise OutputError(f"cannot write config file {fname}: {exc}")
