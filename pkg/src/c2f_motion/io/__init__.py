from .cfl import *
from .keyvalue import *
from .render import *
from .store import *
