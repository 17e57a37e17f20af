from acvar.core.exceptions import *
from acvar.core.exterior_core import *
from acvar.core.geometry import *
from acvar.core.calculus import *
from acvar.core.integration import *
from acvar.core.variational import *
