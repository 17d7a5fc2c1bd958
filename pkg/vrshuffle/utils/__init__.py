from .debugtimer import DebugTimer, debugtimer
from .configfile import (ConfigFile, get_configfolder, get_default_configfile,
                         load_yaml, load_toml)
