from .diff import *
from .float_encoder import *
