"""Finite Kripke frames, modal algebras, their dualities, and the layered
universal-model construction, with exhaustive desk-scale verifiers."""

from .frames import Frame, PMorphism, Violation, validate_pmorphism
from .colimits import (Cocone, Diagram, FrameChain, chain_colimit,
                       coequalizer, cokernel_pair, coproduct, equalizer,
                       factor_through_stage, is_epi, verify_colimit)
from .algebras import (AlgebraMorphism, ModalAlgebra, atoms, atoms_frame,
                       check_caba_distributivity, check_grz, check_s4,
                       dual_morphism, epsilon, eta, powerset_algebra)
from .models import (Irreducible, Model, ModelMorphism, VarSet, ViolatesA,
                     ViolatesB, check_irreducible, irreducible_oracle,
                     pointed_iso, reduce, reduce_step)
from .universal import (NewClusterSpec, UniversalStage, build_universal,
                        embed_irreducible, next_stage, stage_dual_algebra,
                        stage_zero)
from .config import Config, load_config

__all__ = [
    "Frame", "PMorphism", "Violation", "validate_pmorphism",
    "Cocone", "Diagram", "FrameChain", "chain_colimit", "coequalizer",
    "cokernel_pair", "coproduct", "equalizer", "factor_through_stage",
    "is_epi", "verify_colimit",
    "AlgebraMorphism", "ModalAlgebra", "atoms", "atoms_frame",
    "check_caba_distributivity", "check_grz", "check_s4", "dual_morphism",
    "epsilon", "eta", "powerset_algebra",
    "Irreducible", "Model", "ModelMorphism", "VarSet", "ViolatesA",
    "ViolatesB", "check_irreducible", "irreducible_oracle", "pointed_iso",
    "reduce", "reduce_step",
    "NewClusterSpec", "UniversalStage", "build_universal",
    "embed_irreducible", "next_stage", "stage_dual_algebra", "stage_zero",
    "Config", "load_config",
]

__version__ = "0.1.0"
