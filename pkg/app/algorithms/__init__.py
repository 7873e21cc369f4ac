"""
Módulo de algoritmos: backends del grafo aleatorio, acciones y construcciones por back-and-forth
"""
from .back_and_forth import LazyAutomorphism, extend_to_automorphism, verify_window
from .backends import Backend, BitBackend, LimitBackend
from .density_steps import AmalgamSetup, HNNSetup, density_step_faithful, density_step_homogeneous
from .free_actions import FreeTupleSetup, free_faithful_step, free_homogeneity_step
from .graph_of_groups import GraphOfGroups, decompose_graph_of_groups, fundamental_group
from .treezation import Treezation

__all__ = [
    'AmalgamSetup',
    'Backend',
    'BitBackend',
    'FreeTupleSetup',
    'GraphOfGroups',
    'HNNSetup',
    'LazyAutomorphism',
    'LimitBackend',
    'Treezation',
    'decompose_graph_of_groups',
    'density_step_faithful',
    'density_step_homogeneous',
    'extend_to_automorphism',
    'free_faithful_step',
    'free_homogeneity_step',
    'fundamental_group',
    'verify_window',
]
