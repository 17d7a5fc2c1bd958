from .main import main, build_parser
from .configfile import VRConfig
from .output import Report
