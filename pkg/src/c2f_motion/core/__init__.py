from .numerics import *
from .warp import *
from .forward import *
