"""Branching and merging homology of combinatorially presented flows."""
from .intlinalg import AbelianGroup, ChainComplex, ChainMap, homology, smith_normal_form, verify_exactness
from .cubcomplex import Cube, PrecubicalComplex, chain_complex, relation_cokernel
from .flowcore import (FlowMorphism, FlowPresentation, Generator, compile_paths, opposite,
                       validate_morphism, validate_presentation)
from .germs import (BRANCHING, MERGING, branching_complex, branching_homology, brute_force_branching,
                    brute_force_merging, check_t_homotopy, germ_pi0, les_report, merging_complex,
                    merging_homology)
from .ingest import ParseError, builtin, parse_flow, parse_morphism, pv_grid, serialize_flow, serialize_morphism

__version__ = "0.1.0"
