from .writers import *
from .scenario_runner import *
