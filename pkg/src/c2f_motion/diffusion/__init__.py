from .schedule import *
from .denoiser import *
from .sampler import *
