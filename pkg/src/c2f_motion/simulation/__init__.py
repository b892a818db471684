from .motion import *
from .phantom import *
from .scenario import *
