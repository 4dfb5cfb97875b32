from .nonlinearity import *
from .weight import *
from .dynamics import *
from .autonomous import *
from .shooting import *
from .connections import *
from .asymptotics import *
