from .linalg import FinAb, RingSpec
from .groups import FiniteGroup, from_name
from .modules import GModule, ModuleMap
from .complexes import ChainMap, Complex
from .cochains import CochainComplex, cochain_cohomology
from .tate import tate_cohomology
from .workspace import Report, Workspace, parse_workspace, run

__version__ = "0.1.0"
