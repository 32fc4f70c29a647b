"""Decoherence of a particle crossing a medium of scattering targets.

Modules:

- :mod:`.linalg` states, tensor products, partial traces, validation
- :mod:`.collision` single-target scattering operators and their blocks
- :mod:`.slabstep` the one-step map across a thin slab
- :mod:`.oracle` exact tensor-product reference and toy models
- :mod:`.generator` Lindblad generator, RK4 integration, coherent/mixed split
- :mod:`.gas` momentum-space gas: hamiltonian, refraction index, kernels
- :mod:`.young` double-slit visibility and the crossed-term check
- :mod:`.cli` command-line front end
"""
from .collision import BORN, EXACT, TargetState, build_collision, slab_operators
from .generator import LindbladGenerator, build_generator, evolve, split_evolve
from .oracle import exact_crossing
from .slabstep import SlabSpec, one_step

__version__ = "0.1.0"

__all__ = [
    "BORN",
    "EXACT",
    "TargetState",
    "build_collision",
    "slab_operators",
    "SlabSpec",
    "one_step",
    "exact_crossing",
    "LindbladGenerator",
    "build_generator",
    "evolve",
    "split_evolve",
]
