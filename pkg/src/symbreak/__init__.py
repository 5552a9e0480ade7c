"""Finite-group symmetry toolkit: equivariant and relaxed-equivariant linear
layers solved from coset-indexed weight constraints, plus a mechanical
verification suite for the underlying symmetry propositions."""

from .errors import (
    ConfigError,
    DataFormatError,
    DivergenceError,
    FaithfulnessError,
    GroupMismatchError,
    RankInstabilityError,
    RepresentationError,
    SizeCapError,
    ToleranceInconsistencyError,
    ToolkitError,
)
from .groups import (
    CosetDecomposition,
    FiniteGroup,
    GroupElement,
    Subgroup,
    conjugacy_class_of_subgroup,
    construct_group,
    left_cosets,
    subgroup_generate,
    trivial_subgroup,
    whole_group,
)
from .network import (
    ACTIVATIONS,
    LayerSpec,
    Network,
    TrainConfig,
    forward,
    gradient,
    load_network,
    loss_mse,
    make_layer,
    noise_inject_forward,
    save_network,
    train,
)
from .reps import (
    Representation,
    act,
    custom_rep,
    direct_sum,
    is_faithful,
    load_custom_rep,
    permutation_rep,
    regular_rep,
)
from .solver import (
    ConstraintSystem,
    WeightBasis,
    assemble_weight,
    build_relaxed,
    build_standard,
    certify_basis,
    export_basis,
    load_basis,
    solve_basis,
    span_projector,
)
from .symmetry import (
    FixedSubspace,
    SymmetryProfile,
    fixed_subspace,
    membership_in_type,
    orbit,
    stabilizer,
    stabilizer_fraction,
    symmetry_profile,
)
from .verify import (
    CheckReport,
    RegisteredCheck,
    argmax_selector_oracle,
    block_action,
    bundle,
    check_composition,
    check_curie,
    check_lipschitz,
    check_orbit_consistency,
    check_relaxed,
    expectations_met,
    group_averaged_table,
    outcome,
    run_all,
    validate_action,
)

__version__ = "0.1.0"
