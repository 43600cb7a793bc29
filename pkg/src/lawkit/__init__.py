"""lawkit: a desk-scale engine for pretheories over arity families, their
concrete models, bounded theory completion, and Kleisli arity experiments."""

from .base import (
    DELTA0,
    FIN,
    ArityFamily,
    ArityHom,
    ArityIndexedFamily,
    FinPresheaf,
    PresheafMap,
    coproduct,
    hom_set,
    is_isomorphic,
    make_graph,
    make_set,
    nerve,
    pushout,
    wide_pushout,
)
from .pretheory import (
    Pretheory,
    Signature,
    Word,
    adjoin_equation,
    adjoin_generator,
    bundled,
    congruence_closure,
    hom_classes,
    initial_pretheory,
    make_signature,
    pretheory_from_signature,
)
from .models import (
    ConcreteModel,
    check_model,
    enumerate_models,
    evaluate_word,
    free_model_bounded,
    is_nerve,
    model_separates,
    segal_check,
)
from .theorycheck import (
    TheoryVerdict,
    complete_to_theory,
    is_theory,
    table_is_theory,
    theories_isomorphic_bounded,
)
from .monadkit import (
    ComputableMonad,
    arity_category,
    builtin,
    catalan_census,
    coequalizer_experiment,
    factor_through,
    free_monad_from_signature,
    hom_census_formulas,
    nerve_arity_probe,
    pushout_preservation,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
