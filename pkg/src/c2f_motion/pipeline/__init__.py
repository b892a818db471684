from .metrics import *
from .reconstruct import *
