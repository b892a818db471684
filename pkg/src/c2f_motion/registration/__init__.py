from .bspline import *
from .descent import *
from .solver import *
