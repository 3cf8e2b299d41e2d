"""Length spectrum multiplicities of arithmetic Fuchsian groups.

Multiplicities come from class numbers of real quadratic orders; the power
sums and L-value sums built on them are in :mod:`lengthspec.analysis` and
:mod:`lengthspec.lfunc`.
"""
from .arith import PellUnit, factorize, kronecker, pell4_fundamental
from .forms import QuadForm, class_number, class_numbers
from .lfunc import ProgressionSpec, l_value_direct, l_value_exact, phi_Knu
from .spectrum import SpectrumTable, SubgroupDescriptor, build_table, load_mtable, trace_record

__version__ = "0.1.0"

__all__ = [
    "PellUnit", "factorize", "kronecker", "pell4_fundamental",
    "QuadForm", "class_number", "class_numbers",
    "ProgressionSpec", "l_value_direct", "l_value_exact", "phi_Knu",
    "SpectrumTable", "SubgroupDescriptor", "build_table", "load_mtable", "trace_record",
]
