"""Morphological-symmetry-equivariant heterogeneous graph networks.

The package builds a typed message-passing network directly from a robot's
kinematic description and its finite morphological symmetry group, and ships
machine checks for the structural guarantees the construction provides
(graph automorphism under the group, and full-model equivariance).

Subpackages / modules
---------------------
groups      finite group tables and representation matrices
morphology  robot config ingestion and validation
graphgen    symmetry-completed heterogeneous graph construction
symlayer    fixed input encoders / output decoders and equivariance checks
netcore     typed message passing, reverse-mode gradients, model bundle
learn       losses, Adam, metrics, training loop
data        CSV ingestion and the synthetic momentum oracle
cli         command-line workflows
kernels     compiled gather/segment kernels with numpy fallback
"""

from mshgnn.groups import GroupSpec, Representation, make_cyclic_group, make_klein_four

__version__ = "0.1.0"

__all__ = [
    "GroupSpec",
    "Representation",
    "make_cyclic_group",
    "make_klein_four",
    "__version__",
]
