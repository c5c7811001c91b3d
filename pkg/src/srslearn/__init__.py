"""L* automata learning with string rewriting systems as advice."""
from .advice import (
    AdviceKind,
    AdviceMode,
    AdvisedTeacher,
    NormalFormCache,
    SignedCache,
    Witness,
    advised_equivalence,
    advised_membership,
    check_consistency,
    check_consistency_csrs,
    check_consistency_mealy,
    check_consistency_one_sided,
    upward_closed_infer,
)
from .automata import (
    Dfa,
    MealyMachine,
    accepts,
    distinguishing_word,
    isomorphic,
    last_output,
    minimize,
    minimize_mealy,
    run_dfa,
    shortest_access_word,
    shortest_counterexample,
    subsumption_relation,
)
from .errors import (
    AdviceError,
    ContractViolation,
    DivergenceError,
    InputError,
    NonTerminationError,
    ParseError,
    UnsupportedAdviceError,
)
from .learner import CexProcessing, InitialTests, LearnerConfig, QueryStats, lstar_learn, lstar_mealy
from .oracle import SimulatedTeacher
from .rewriting import (
    ControlledRule,
    Csrs,
    RewriteRule,
    Srs,
    check_convergence,
    csrs_normal_form,
    normal_form,
    single_step,
)
from .rng import SplitMix64
from .words import Alphabet, word

__version__ = "0.1.0"
