from .arrays import *
from .config import *
from .exceptions import *
from .problem import *
